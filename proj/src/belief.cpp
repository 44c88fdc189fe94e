#include "markper/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace markper {

Belief::Belief(std::vector<double> weights, double eps) : w_(std::move(weights)) {
  if (w_.size() < 2) {
    throw std::invalid_argument("belief needs at least two states");
  }
  double sum = 0.0;
  for (double x : w_) {
    if (!std::isfinite(x)) throw std::invalid_argument("belief entry not finite");
    if (x < -eps) throw std::invalid_argument("belief entry below -eps_num");
    sum += x;
  }
  if (std::abs(sum - 1.0) > eps * static_cast<double>(w_.size())) {
    throw std::invalid_argument("belief mass does not sum to one");
  }
  double clamped = 0.0;
  for (double& x : w_) {
    x = std::clamp(x, 0.0, 1.0);
    clamped += x;
  }
  for (double& x : w_) x /= clamped;
}

Belief Belief::vertex(int dim, int state) {
  if (dim < 2 || state < 0 || state >= dim) {
    throw std::invalid_argument("bad vertex request");
  }
  std::vector<double> w(dim, 0.0);
  w[state] = 1.0;
  return Belief(std::move(w));
}

Belief Belief::uniform(int dim) {
  if (dim < 2) throw std::invalid_argument("bad uniform request");
  return Belief(std::vector<double>(dim, 1.0 / dim));
}

double Belief::l1_distance(const Belief& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("dimension mismatch");
  double d = 0.0;
  for (int i = 0; i < dim(); ++i) d += std::abs(w_[i] - other.w_[i]);
  return d;
}

double Belief::linf_distance(const Belief& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("dimension mismatch");
  double d = 0.0;
  for (int i = 0; i < dim(); ++i) d = std::max(d, std::abs(w_[i] - other.w_[i]));
  return d;
}

bool Belief::approx_equal(const Belief& other, double tol) const {
  return linf_distance(other) <= tol;
}

Split::Split(std::vector<SplitAtom> atoms, double eps) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("split needs at least one atom");
  const int k = atoms_.front().posterior.dim();
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.posterior.dim() != k) throw std::invalid_argument("split atom dimension mismatch");
    if (!(a.weight > 0.0) || a.weight > 1.0 + eps) {
      throw std::invalid_argument("split weight outside (0,1]");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > eps * static_cast<double>(atoms_.size())) {
    throw std::invalid_argument("split weights do not sum to one");
  }
}

Split Split::trivial(const Belief& p) { return Split({SplitAtom{p, 1.0}}); }

Belief Split::barycenter() const {
  const int k = dim();
  std::vector<double> w(k, 0.0);
  for (const auto& a : atoms_) {
    for (int i = 0; i < k; ++i) w[i] += a.weight * a.posterior[i];
  }
  return Belief(std::move(w));
}

bool Split::averages_to(const Belief& p, double tol) const {
  return barycenter().linf_distance(p) <= tol;
}

}  // namespace markper
