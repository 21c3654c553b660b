#include "htpg/random.hpp"

#include <cmath>
#include <numbers>

namespace htpg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Stream Stream::split(std::uint64_t id) const {
  return Stream(splitmix64(seed_ ^ splitmix64(id + 0x632be59bd9b4e019ULL)));
}

double Stream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double Stream::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Stream::exponential() { return -std::log(uniform_open()); }

}  // namespace htpg
