#include "slosh/bond.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "slosh/errors.hpp"

namespace slosh {

BondNumber BondNumber::finite(double value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw InvalidArgument("Bond number must be positive and finite, got " + std::to_string(value));
  }
  BondNumber bo;
  bo.infinite_ = false;
  bo.value_ = value;
  return bo;
}

BondNumber BondNumber::parse(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity") return infinite();
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument("cannot parse Bond number '" + std::string(text) + "'");
  }
  return finite(value);
}

double BondNumber::value() const {
  if (infinite_) throw InvalidArgument("Bond number is infinite");
  return value_;
}

std::string BondNumber::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, ptr);
}

}  // namespace slosh
