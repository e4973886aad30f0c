#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

void extend_partition(Eigen::VectorXi& z, int i, int used,
                      std::vector<Eigen::VectorXi>& out) {
  const int n = static_cast<int>(z.size());
  if (i == n) {
    out.push_back(z);
    return;
  }
  for (int label = 1; label <= used + 1; ++label) {
    z[i] = label;
    extend_partition(z, i + 1, std::max(used, label), out);
  }
  z[i] = 0;
}

}  // namespace

std::vector<Eigen::VectorXi> all_partitions(int n) {
  if (n < 1 || n > 10) throw std::invalid_argument("all_partitions: bad n");
  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXi z = Eigen::VectorXi::Zero(n);
  z[0] = 1;
  extend_partition(z, 1, 1, out);
  return out;
}

std::string partition_key(const Eigen::VectorXi& z) {
  std::map<int, int> relabel;
  std::string key;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    auto it = relabel.find(z[i]);
    int label;
    if (it == relabel.end()) {
      label = static_cast<int>(relabel.size()) + 1;
      relabel.emplace(z[i], label);
    } else {
      label = it->second;
    }
    if (i > 0) key += ',';
    key += std::to_string(label);
  }
  return key;
}

double total_variation(const std::map<std::string, long>& tally, long draws,
                       const std::map<std::string, double>& exact) {
  double tv = 0.0;
  for (const auto& [key, prob] : exact) {
    auto it = tally.find(key);
    const double emp =
        it == tally.end() ? 0.0 : static_cast<double>(it->second) / draws;
    tv += std::abs(emp - prob);
  }
  // Mass the empirical tally puts on outcomes the exact table lacks.
  for (const auto& [key, count] : tally) {
    if (exact.find(key) == exact.end())
      tv += static_cast<double>(count) / draws;
  }
  return 0.5 * tv;
}

namespace {

double simpson_rule(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const std::function<double(double)>& f, double a,
                       double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(f, a, fa, m, fm, lm, flm);
  const double right = simpson_rule(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                         depth - 1) +
         simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                         depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson_rule(f, a, fa, b, fb, m, fm);
  return simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double quadrature_marginal_loglik(const std::vector<int>& ys,
                                  const std::vector<double>& ss, double alpha,
                                  double beta) {
  if (ys.size() != ss.size() || ys.empty())
    throw std::invalid_argument("quadrature_marginal_loglik: bad inputs");
  long sum_y = 0;
  double sum_s = 0.0;
  double const_part = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    sum_y += ys[i];
    sum_s += ss[i];
    const_part += ys[i] * std::log(ss[i]) - std::lgamma(ys[i] + 1.0);
  }
  // The integrand in u = log(mu) is proportional to
  //   exp((alpha + sum_y) u - (beta + sum_s) e^u),
  // a Gamma(alpha + sum_y, beta + sum_s) density for mu.  Peak location and a
  // log-scale normalizer keep the numeric integral well conditioned.
  const double a_post = alpha + static_cast<double>(sum_y);
  const double b_post = beta + sum_s;
  const double u_mode = std::log(a_post / b_post);
  const double log_peak = a_post * u_mode - b_post * std::exp(u_mode);
  auto integrand = [&](double u) {
    return std::exp(a_post * u - b_post * std::exp(u) - log_peak);
  };
  const double integral =
      adaptive_simpson(integrand, u_mode - 40.0, u_mode + 40.0, 1e-13);
  return const_part + alpha * std::log(beta) - std::lgamma(alpha) + log_peak +
         std::log(integral);
}

namespace {

long pairs_same(const Eigen::VectorXi& z) {
  long count = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    for (Eigen::Index j = i + 1; j < z.size(); ++j)
      if (z[i] == z[j]) ++count;
  return count;
}

}  // namespace

double naive_ari(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("naive_ari: bad inputs");
  const long n = static_cast<long>(a.size());
  long both = 0;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      if (a[i] == a[j] && b[i] == b[j]) ++both;
  const long in_a = pairs_same(a);
  const long in_b = pairs_same(b);
  const long total = n * (n - 1) / 2;
  const double expected =
      static_cast<double>(in_a) * static_cast<double>(in_b) / total;
  const double max_index = 0.5 * (in_a + in_b);
  if (max_index == expected) {
    // Degenerate: both all-singletons or both one block.
    return in_a == in_b ? 1.0 : 0.0;
  }
  return (both - expected) / (max_index - expected);
}

double naive_auc(const std::vector<std::uint8_t>& truth,
                 const Eigen::VectorXd& scores) {
  if (static_cast<Eigen::Index>(truth.size()) != scores.size())
    throw std::invalid_argument("naive_auc: size mismatch");
  long wins2 = 0;  // counts in half-units so ties stay exact
  long n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth[i]) continue;
    ++n_pos;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (truth[j]) continue;
      if (scores[i] > scores[j])
        wins2 += 2;
      else if (scores[i] == scores[j])
        wins2 += 1;
    }
  }
  for (std::size_t j = 0; j < truth.size(); ++j)
    if (!truth[j]) ++n_neg;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("naive_auc: need both classes");
  return 0.5 * wins2 / (static_cast<double>(n_pos) * n_neg);
}

NaiveConfusion naive_confusion(const std::vector<std::uint8_t>& truth,
                               const std::vector<std::uint8_t>& predicted) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("naive_confusion: size mismatch");
  NaiveConfusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] && predicted[i]) ++c.tp;
    if (truth[i] && !predicted[i]) ++c.fn;
    if (!truth[i] && predicted[i]) ++c.fp;
    if (!truth[i] && !predicted[i]) ++c.tn;
  }
  c.sensitivity = (c.tp + c.fn) == 0
                      ? 0.0
                      : static_cast<double>(c.tp) / (c.tp + c.fn);
  c.specificity = (c.tn + c.fp) == 0
                      ? 0.0
                      : static_cast<double>(c.tn) / (c.tn + c.fp);
  const double denom2 = static_cast<double>(c.tp + c.fp) *
                        static_cast<double>(c.tp + c.fn) *
                        static_cast<double>(c.tn + c.fp) *
                        static_cast<double>(c.tn + c.fn);
  c.mcc = denom2 == 0.0 ? 0.0
                        : (static_cast<double>(c.tp) * c.tn -
                           static_cast<double>(c.fp) * c.fn) /
                              std::sqrt(denom2);
  return c;
}

}  // namespace oracles
