#include "stlrl/rng.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace stlrl {

// Text state, length-prefixed so it can sit inside binary checkpoints.
void Rng::save(std::ostream& os) const {
  std::ostringstream text;
  text << engine_ << ' ' << normal_;
  const std::string s = text.str();
  const std::uint64_t n = s.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(s.data(), static_cast<std::streamsize>(n));
}

void Rng::load(std::istream& is) {
  std::uint64_t n = 0;
  if (!is.read(reinterpret_cast<char*>(&n), sizeof n) || n > (1u << 20))
    throw std::runtime_error("random stream state is corrupt");
  std::string s(n, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(n)))
    throw std::runtime_error("random stream state is truncated");
  std::istringstream text(s);
  if (!(text >> engine_ >> normal_)) throw std::runtime_error("random stream state is corrupt");
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  return derive_seed(master, stream, 0);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(master),
                                   static_cast<std::uint32_t>(master >> 32),
                                   static_cast<std::uint32_t>(index),
                                   static_cast<std::uint32_t>(index >> 32)};
  for (char c : stream) words.push_back(static_cast<unsigned char>(c));
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace stlrl
