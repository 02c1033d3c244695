#pragma once
// Exact residues of products of integer powers of linear forms, by Laurent expansion in rationals.

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace oracle {

using Q = boost::multiprecision::cpp_rational;

// (alpha + beta w)^k
struct Linear {
  Q alpha, beta;
  int k;
};

inline Q pow_q(Q base, int e) {
  Q out = 1;
  if (e < 0) {
    base = 1 / base;
    e = -e;
  }
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

inline std::vector<Q> mul(const std::vector<Q>& a, const std::vector<Q>& b) {
  std::vector<Q> out(std::min(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t l = 0; l <= i; ++l) out[i] += a[l] * b[i - l];
  return out;
}

// Res_{w=c} Π (α+βw)^k · poly(w), poly given by coefficients in w
inline Q residue(const std::vector<Linear>& fs, const Q& c, const std::vector<Q>& poly = {Q(1)}) {
  int shift = 0;
  Q scale = 1;
  std::vector<const Linear*> regular;
  for (const Linear& f : fs) {
    if (f.k == 0) continue;
    if (f.alpha + f.beta * c == 0) {
      shift += f.k;
      scale *= pow_q(f.beta, f.k);
    } else {
      regular.push_back(&f);
    }
  }
  const int order = -1 - shift;  // coefficient of u^order in the regular part, w = c + u
  if (order < 0) return 0;
  std::vector<Q> acc(order + 1);
  acc[0] = 1;
  for (const Linear* f : regular) {
    const Q a = f->alpha + f->beta * c;
    const Q r = f->beta / a;
    std::vector<Q> s(order + 1);
    s[0] = pow_q(a, f->k);
    for (int i = 1; i <= order; ++i) s[i] = s[i - 1] * Q(f->k - (i - 1)) / Q(i) * r;
    acc = mul(acc, s);
  }
  // poly(c+u) in powers of u
  std::vector<Q> shifted(order + 1);
  for (std::size_t d = 0; d < poly.size(); ++d) {
    Q binom = 1;
    for (std::size_t i = 0; i <= d; ++i) {
      if (static_cast<int>(i) <= order) shifted[i] += poly[d] * binom * pow_q(c, static_cast<int>(d - i));
      binom = binom * Q(static_cast<int>(d - i)) / Q(static_cast<int>(i + 1));
    }
  }
  return scale * mul(acc, shifted)[order];
}

inline double to_double(const Q& v) { return static_cast<double>(v); }

}  // namespace oracle
