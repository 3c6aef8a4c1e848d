#pragma once

#include <string>
#include <string_view>

namespace slosh {

/// Bond number Bo = rho g a^2 / T. Infinity (no surface tension) is a
/// distinguished state rather than a large float, so the capillary term can
/// be dropped exactly.
class BondNumber {
 public:
  static BondNumber infinite() { return BondNumber(); }
  /// Throws InvalidArgument unless value is finite and positive.
  static BondNumber finite(double value);
  /// Accepts "inf" (case-insensitive) or a positive decimal number.
  static BondNumber parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  /// Throws InvalidArgument when infinite.
  double value() const;
  /// 1/Bo, exactly zero for the infinite state.
  double inverse() const noexcept { return infinite_ ? 0.0 : 1.0 / value_; }
  std::string to_string() const;

  friend bool operator==(const BondNumber&, const BondNumber&) = default;

 private:
  BondNumber() = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

}  // namespace slosh
