#include "matchstab/zchain.hpp"

#include <array>
#include <cmath>

#include "matchstab/error.hpp"

namespace matchstab {
namespace {

void require_nn(const ArrivalMeasure& measure) {
  const MatchingStructure& g = measure.structure();
  bool shape_ok = g.customer_count() == 3 && g.server_count() == 3 &&
                  g.edges() == std::vector<std::pair<int, int>>{
                                   {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}};
  if (!shape_ok)
    throw Error(Errc::NotNNModel, "the auxiliary chain is tied to the NN graph");
  for (int c = 0; c < 3; ++c)
    for (int s = 0; s < 3; ++s)
      if (!measure.at(c, s).is_positive())
        throw Error(Errc::NotNNModel, "the auxiliary chain needs supp(mu) = CxS");
}

}  // namespace

ZChainParams ZChainParams::validate(ZChainParams p) {
  auto row_ok = [](const Rational& d, const Rational& st, const Rational& u) {
    return !d.is_negative() && !st.is_negative() && !u.is_negative() &&
           d + st + u == Rational(1);
  };
  if (!row_ok(p.a_down, p.a_stay, p.a_up) || !row_ok(p.b_down, p.b_stay, p.b_up) ||
      !row_ok(p.c_down, p.c_stay, p.c_up))
    throw Error(Errc::BadInput, "each jump row must be a distribution");
  if (!p.a_down.is_positive() || !p.a_up.is_positive() ||
      !p.b_down.is_positive() || !p.b_up.is_positive() ||
      !p.c_down.is_positive() || !p.c_up.is_positive())
    throw Error(Errc::BadInput, "outer jump probabilities must be positive");
  return p;
}

ZChainParams z_chain_params_nn(const ArrivalMeasure& m) {
  require_nn(m);
  ZChainParams p;
  p.a_up = m.at(0, 0) + m.at(0, 2) + m.at(1, 0) + m.at(1, 2);
  p.a_stay = m.at(0, 1) + m.at(1, 1) + m.at(2, 0) + m.at(2, 2);
  p.a_down = m.at(2, 1);
  p.b_up = m.at(1, 0) + m.at(1, 2);
  p.b_stay = m.at(0, 0) + m.at(0, 2) + m.at(1, 1) + m.at(2, 0) + m.at(2, 2);
  p.b_down = m.at(0, 1) + m.at(2, 1);
  p.c_up = m.at(1, 2);
  p.c_stay = m.at(0, 2) + m.at(1, 0) + m.at(1, 1) + m.at(2, 2);
  p.c_down = m.at(0, 0) + m.at(0, 1) + m.at(2, 0) + m.at(2, 1);
  return ZChainParams::validate(p);
}

ZChainStationary z_chain_stationary(const ZChainParams& p) {
  ZChainParams::validate(p);
  if (!(p.a_down < p.a_up) || !(p.c_up < p.c_down))
    throw Error(Errc::NotPositiveRecurrent,
                "needs a_down < a_up and c_up < c_down");
  ZChainStationary out;
  Rational gap_neg = p.a_up - p.a_down;
  Rational gap_pos = p.c_down - p.c_up;
  out.pi0 = Rational(1) / (Rational(1) + p.b_down / gap_neg + p.b_up / gap_pos);
  out.pi_pos = out.pi0 * p.b_up / gap_pos;
  out.pi_neg = out.pi0 * p.b_down / gap_neg;
  out.ratio_pos = p.c_up / p.c_down;
  out.ratio_neg = p.a_down / p.a_up;
  return out;
}

Rational ZChainStationary::point(const ZChainParams& p, long long x) const {
  if (x == 0) return pi0;
  Rational factor = x > 0 ? pi0 * p.b_up / p.c_up : pi0 * p.b_down / p.a_down;
  Rational ratio = x > 0 ? ratio_pos : ratio_neg;
  Rational out = factor;
  for (long long i = 0; i < std::llabs(x); ++i) out *= ratio;
  return out;
}

double ZChainStationary::point_double(const ZChainParams& p, long long x) const {
  if (x == 0) return pi0.to_double();
  double factor = x > 0 ? (pi0 * p.b_up / p.c_up).to_double()
                        : (pi0 * p.b_down / p.a_down).to_double();
  double ratio = x > 0 ? ratio_pos.to_double() : ratio_neg.to_double();
  return factor * std::pow(ratio, static_cast<double>(std::llabs(x)));
}

NnDriftNumbers nn_counterexample_drift(const ArrivalMeasure& m) {
  require_nn(m);
  ZChainParams p = z_chain_params_nn(m);
  ZChainStationary pi = z_chain_stationary(p);
  NnDriftNumbers out;
  out.alpha = m.at(2, 1) + m.at(2, 2) - m.at(0, 0) - m.at(1, 0);
  out.beta = m.at(1, 2) + m.at(2, 1) + m.at(2, 2) - m.at(0, 0);
  out.gamma = m.at(1, 2) + m.at(2, 2) - m.at(0, 0) - m.at(0, 1);
  out.composite = pi.pi_neg * out.alpha + pi.pi0 * out.beta + pi.pi_pos * out.gamma;
  return out;
}

std::vector<double> z_chain_truncated_stationary(const ZChainParams& params,
                                                 int cap) {
  ZChainParams::validate(params);
  if (cap < 1) throw Error(Errc::BadInput, "cap must be at least 1");
  const int n = 2 * cap + 1;
  auto row_for = [&](int state) {
    if (state < 0) return std::array<double, 3>{params.a_down.to_double(),
                                                params.a_stay.to_double(),
                                                params.a_up.to_double()};
    if (state == 0) return std::array<double, 3>{params.b_down.to_double(),
                                                 params.b_stay.to_double(),
                                                 params.b_up.to_double()};
    return std::array<double, 3>{params.c_down.to_double(),
                                 params.c_stay.to_double(),
                                 params.c_up.to_double()};
  };

  // Solve pi (P - I) = 0 with the normalization row appended, dense LU with
  // partial pivoting on the transposed system.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    int state = i - cap;
    auto [down, stay, up] = row_for(state);
    int to_down = state - 1 < -cap ? cap : i - 1;  // rim jumps go to state 0
    int to_up = state + 1 > cap ? cap : i + 1;
    a[to_down][i] += down;
    a[i][i] += stay;
    a[to_up][i] += up;
  }
  for (int i = 0; i < n; ++i) a[i][i] -= 1.0;
  for (int j = 0; j < n; ++j) a[n - 1][j] = 1.0;  // replace one balance row
  a[n - 1][n] = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    if (a[col][col] == 0.0)
      throw Error(Errc::Internal, "singular truncated system");
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      double factor = a[r][col] / a[col][col];
      for (int c2 = col; c2 <= n; ++c2) a[r][c2] -= factor * a[col][c2];
    }
  }
  std::vector<double> pi(n);
  for (int i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

}  // namespace matchstab
