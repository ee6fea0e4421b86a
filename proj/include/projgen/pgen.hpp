#pragma once

// Exact arithmetic for projection-generator counts: coprimality bounds,
// Bézout witnesses, Cuntz and UHF values, and the K_0 divisibility test
// k·a = [1].

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "projgen/errors.hpp"

namespace projgen {

/// A natural number or +∞.
class ExtNat {
 public:
  constexpr ExtNat() = default;
  constexpr explicit ExtNat(std::uint64_t v) : value_(v) {}
  static constexpr ExtNat infinity() {
    ExtNat x;
    x.infinite_ = true;
    return x;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr std::uint64_t value() const {
    if (infinite_) throw precondition_error("ExtNat: value of infinity");
    return value_;
  }

  friend constexpr bool operator==(const ExtNat& a, const ExtNat& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr bool operator<(const ExtNat& a, const ExtNat& b) {
    if (a.infinite_) return false;
    return b.infinite_ || a.value_ < b.value_;
  }
  friend constexpr bool operator<=(const ExtNat& a, const ExtNat& b) { return !(b < a); }

  std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

  /// Accepts decimal digits or "inf" / "infinity" / "∞".
  static ExtNat parse(std::string_view s) {
    if (s == "inf" || s == "infinity" || s == "∞") return infinity();
    if (s.empty()) throw parse_error("empty number");
    std::uint64_t v = 0;
    for (char ch : s) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) {
        throw parse_error("not a natural number: '" + std::string(s) + "'");
      }
      const std::uint64_t digit = std::uint64_t(ch - '0');
      if (v > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
        throw parse_error("number too large: '" + std::string(s) + "'");
      }
      v = v * 10 + digit;
    }
    return ExtNat(v);
  }

 private:
  std::uint64_t value_ = 0;
  bool infinite_ = false;
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t f = 3; f <= n / f; f += 2)
    if (n % f == 0) return false;
  return true;
}

/// Prime factorization by trial division, ascending primes.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
    std::uint64_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Formal product Π p^{n_p} with exponents in N ∪ {∞}.
class SupernaturalNumber {
 public:
  SupernaturalNumber() = default;

  /// Sets the exponent of a prime; a zero exponent removes it.
  SupernaturalNumber& set(std::uint64_t prime, ExtNat exponent) {
    if (!is_prime(prime)) {
      throw precondition_error("supernatural factor " + std::to_string(prime) + " is not prime");
    }
    if (exponent == ExtNat(0)) {
      factors_.erase(prime);
    } else {
      factors_[prime] = exponent;
    }
    return *this;
  }

  static SupernaturalNumber prime_power(std::uint64_t prime, ExtNat exponent) {
    SupernaturalNumber q;
    q.set(prime, exponent);
    return q;
  }

  ExtNat exponent(std::uint64_t prime) const {
    auto it = factors_.find(prime);
    return it == factors_.end() ? ExtNat(0) : it->second;
  }

  const std::map<std::uint64_t, ExtNat>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  bool is_finite() const {
    for (const auto& [p, e] : factors_)
      if (e.is_infinite()) return false;
    return true;
  }

  /// Parses products such as "2^inf*3^2*7". Repeated primes add exponents.
  /// Factors must be primes; "1" is the empty product.
  static SupernaturalNumber parse(std::string_view text) {
    std::string s;
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw parse_error("empty supernatural number");
    SupernaturalNumber q;
    if (s == "1") return q;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t star = s.find('*', pos);
      const std::string term = s.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
      if (term.empty()) throw parse_error("empty factor in '" + s + "'");
      const std::size_t caret = term.find('^');
      const ExtNat base = ExtNat::parse(term.substr(0, caret));
      const ExtNat exp = caret == std::string::npos ? ExtNat(1) : ExtNat::parse(term.substr(caret + 1));
      if (base.is_infinite() || !is_prime(base.value())) {
        throw parse_error("factor base '" + term.substr(0, caret) + "' is not a prime");
      }
      const ExtNat old = q.exponent(base.value());
      ExtNat sum = (old.is_infinite() || exp.is_infinite()) ? ExtNat::infinity()
                                                            : ExtNat(old.value() + exp.value());
      q.set(base.value(), sum);
      if (star == std::string::npos) break;
      pos = star + 1;
    }
    return q;
  }

  std::string to_string() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (const auto& [p, e] : factors_) {
      if (!out.empty()) out += "*";
      out += std::to_string(p);
      if (!(e == ExtNat(1))) out += "^" + e.to_string();
    }
    return out;
  }

  friend bool operator==(const SupernaturalNumber&, const SupernaturalNumber&) = default;

 private:
  std::map<std::uint64_t, ExtNat> factors_;
};

/// q ≡ 0 mod y: every prime power of y is dominated by q.
inline bool supernatural_divisible(const SupernaturalNumber& q, std::uint64_t y) {
  if (y == 0) throw precondition_error("supernatural_divisible: y must be positive");
  for (const auto& [p, e] : factorize(y)) {
    if (q.exponent(p) < ExtNat(e)) return false;
  }
  return true;
}

/// Least k ≥ 3 with gcd(k, m) = 1.
inline std::uint64_t min_coprime(std::uint64_t m) {
  if (m == 0) throw precondition_error("min_coprime: m must be positive");
  std::uint64_t k = 3;
  while (std::gcd(k, m) != 1) ++k;
  return k;
}

struct BezoutPair {
  std::uint64_t c = 0;
  std::uint64_t d = 0;
  std::uint64_t k = 0;
  std::uint64_t m = 0;
};

/// Integers (g, s, t) with a·s + b·t = g = gcd(a, b).
inline std::tuple<std::int64_t, std::int64_t, std::int64_t> extended_gcd(std::int64_t a,
                                                                         std::int64_t b) {
  std::int64_t old_r = a, r = b;
  std::int64_t old_s = 1, s = 0;
  std::int64_t old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
    old_t -= q * t;
    std::swap(old_t, t);
  }
  return {old_r, old_s, old_t};
}

/// Naturals c, d ≥ 1 with kc − md = 1 and c minimal.
///
/// Any integer solution (s, t) of ks − mt = 1 shifts to (s + ml, t + kl);
/// the smallest shift with both entries positive is returned.
inline BezoutPair bezout_natural(std::uint64_t k, std::uint64_t m) {
  if (k == 0 || m == 0) throw precondition_error("bezout_natural: k and m must be positive");
  if (k > std::uint64_t(std::numeric_limits<std::int32_t>::max()) ||
      m > std::uint64_t(std::numeric_limits<std::int32_t>::max())) {
    throw precondition_error("bezout_natural: arguments too large");
  }
  const auto [g, s, t_neg] = extended_gcd(std::int64_t(k), std::int64_t(m));
  if (g != 1) {
    throw precondition_error("bezout_natural: gcd(" + std::to_string(k) + ", " +
                             std::to_string(m) + ") != 1");
  }
  // k·s + m·t_neg = 1, so c ≡ s (mod m) and d = (kc − 1)/m.
  const std::int64_t mm = std::int64_t(m);
  std::int64_t c = ((s % mm) + mm) % mm;
  if (c == 0) c = mm;
  while ((std::int64_t(k) * c - 1) / mm < 1) c += mm;
  BezoutPair out;
  out.k = k;
  out.m = m;
  out.c = std::uint64_t(c);
  out.d = std::uint64_t((std::int64_t(k) * c - 1) / mm);
  return out;
}

/// Projection-generator count of the Cuntz algebra O_n: the least k ≥ 3
/// coprime to n − 1, and ∞ for O_∞.
inline ExtNat pgen_cuntz(ExtNat n) {
  if (n.is_infinite()) return ExtNat::infinity();
  if (n.value() < 2) throw precondition_error("pgen_cuntz: n must be at least 2");
  return ExtNat(min_coprime(n.value() - 1));
}

/// Least n ≥ 3 with q ≡ 0 mod n, or ∞ when no such n exists (q = 1 or 2).
///
/// The smallest candidate divisor is bounded by the least odd prime of q,
/// or by 4 when 2² divides q, so the scan terminates without forming q.
inline ExtNat pgen_uhf(const SupernaturalNumber& q) {
  std::optional<std::uint64_t> bound;
  for (const auto& [p, e] : q.factors()) {
    if (p != 2) {
      bound = p;
      break;
    }
  }
  if (ExtNat(2) <= q.exponent(2)) bound = bound ? std::min<std::uint64_t>(*bound, 4) : 4;
  if (!bound) return ExtNat::infinity();
  for (std::uint64_t n = 3; n <= *bound; ++n)
    if (supernatural_divisible(q, n)) return ExtNat(n);
  return ExtNat::infinity();  // unreachable: the bound itself divides q
}

/// Model of (K_0, [1]) for the families handled here.
struct KZeroModel {
  enum class Kind { integers, cyclic, localized };
  Kind kind = Kind::integers;
  std::uint64_t modulus = 1;  // cyclic: Z/mZ
  SupernaturalNumber q;       // localized: Z_(q)
  std::int64_t unit_class = 1;

  static KZeroModel integers(std::int64_t unit = 1) { return {Kind::integers, 1, {}, unit}; }
  static KZeroModel cyclic(std::uint64_t m, std::int64_t unit = 1) {
    if (m == 0) throw precondition_error("cyclic K_0 model needs m >= 1");
    return {Kind::cyclic, m, {}, unit};
  }
  static KZeroModel localized(SupernaturalNumber q) { return {Kind::localized, 1, std::move(q), 1}; }
};

/// Whether k·a = [1] has a solution a in the model. A false result rules
/// out generation by k mutually equivalent projections summing to a unit
/// equivalent.
inline bool unit_class_divisible(const KZeroModel& model, std::uint64_t k) {
  if (k < 2) throw precondition_error("unit_class_divisible: k must be at least 2");
  const std::int64_t u = model.unit_class;
  switch (model.kind) {
    case KZeroModel::Kind::integers:
      return u % std::int64_t(k) == 0;
    case KZeroModel::Kind::cyclic: {
      const std::uint64_t m = model.modulus;
      const std::uint64_t ur = std::uint64_t(((u % std::int64_t(m)) + std::int64_t(m)) % std::int64_t(m));
      return ur % std::gcd(k, m) == 0;
    }
    case KZeroModel::Kind::localized: {
      // a = u/k lies in Z_(q) iff k / gcd(k, u) divides q.
      const std::uint64_t g = std::gcd(k, std::uint64_t(u < 0 ? -u : u));
      return supernatural_divisible(model.q, k / (g == 0 ? 1 : g));
    }
  }
  throw precondition_error("unit_class_divisible: unsupported model");
}

struct CuntzFamily {
  ExtNat n;
};
struct UhfFamily {
  SupernaturalNumber q;
};
struct TorsionFamily {
  std::uint64_t m = 1;  // order of [1] in K_0 of a purely infinite simple algebra
};
using AlgebraFamily = std::variant<CuntzFamily, UhfFamily, TorsionFamily>;

struct PgenReport {
  std::string family;
  ExtNat lower;
  ExtNat upper;
  std::optional<ExtNat> exact;
  std::string formula;
  std::vector<std::string> notes;
};

inline PgenReport pgen_bound_report(const AlgebraFamily& family) {
  PgenReport r;
  if (const auto* c = std::get_if<CuntzFamily>(&family)) {
    r.family = "cuntz(" + c->n.to_string() + ")";
    if (c->n.is_infinite()) {
      r.lower = r.upper = ExtNat::infinity();
      r.formula = "K_0(O_inf) = Z with [1] = 1; k*a = 1 has no solution for k >= 2";
      r.notes.push_back("no k >= 2 passes the divisibility test k*a = [1]");
    } else {
      const ExtNat v = pgen_cuntz(c->n);
      r.lower = r.upper = v;
      r.formula = "min{k >= 3 : gcd(k, n-1) = 1}";
      r.notes.push_back("upper bound from coprimality, lower bound from K_0 = Z/" +
                        std::to_string(c->n.value() - 1) + "Z divisibility");
    }
    r.exact = r.upper;
  } else if (const auto* u = std::get_if<UhfFamily>(&family)) {
    r.family = "uhf(" + u->q.to_string() + ")";
    r.formula = "min{n >= 3 : q = 0 mod n}";
    const ExtNat v = pgen_uhf(u->q);
    r.upper = v;
    if (u->q.is_finite()) {
      r.lower = ExtNat(2);
      r.notes.push_back("q is finite: the algebra is a full matrix algebra, not of infinite type; "
                        "only the upper bound is reported");
      if (v.is_infinite()) r.notes.push_back("q has no divisor >= 3");
    } else {
      r.lower = v;
      r.exact = v;
    }
  } else {
    const auto& t = std::get<TorsionFamily>(family);
    if (t.m == 0) throw precondition_error("torsion order must be positive");
    r.family = "torsion(" + std::to_string(t.m) + ")";
    r.formula = "3 <= Pgen <= min{k >= 3 : gcd(k, m) = 1}";
    r.lower = ExtNat(3);
    r.upper = ExtNat(min_coprime(t.m));
    if (r.upper == r.lower) {
      r.exact = r.upper;
      if (t.m % 3 != 0) r.notes.push_back("m = 3j-1 or 3j-2, so gcd(3, m) = 1");
    } else {
      r.notes.push_back("bounds do not meet; the value is not determined by the order of [1] alone");
    }
  }
  return r;
}

/// Parses "cuntz 4", "cuntz(4)", "uhf 2^inf", "torsion(5)".
inline AlgebraFamily parse_family(std::string_view text) {
  std::string s(text);
  for (char& ch : s)
    if (ch == '(' || ch == ')') ch = ' ';
  std::istringstream in(s);
  std::string kind, arg, extra;
  in >> kind >> arg;
  if (kind.empty() || arg.empty() || (in >> extra)) {
    throw parse_error("expected '<family> <argument>', got '" + std::string(text) + "'");
  }
  if (kind == "cuntz") return CuntzFamily{ExtNat::parse(arg)};
  if (kind == "uhf") return UhfFamily{SupernaturalNumber::parse(arg)};
  if (kind == "torsion") {
    const ExtNat m = ExtNat::parse(arg);
    if (m.is_infinite()) throw parse_error("torsion order must be finite");
    return TorsionFamily{m.value()};
  }
  throw parse_error("unknown algebra family '" + kind + "'");
}

}  // namespace projgen
