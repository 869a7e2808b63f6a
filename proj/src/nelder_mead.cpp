#include "blockeig/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace blockeig {

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const RVector&)>& f, const RVector& x0,
    double initial_step, const NelderMeadOptions& options) {
  const Index dim = x0.size();
  if (dim == 0) {
    return {x0, f(x0), 0, 1, true};
  }
  const Index max_iters =
      options.max_iters > 0 ? options.max_iters : 2000 * dim;

  constexpr double rho = 1.0;    // reflection
  constexpr double chi = 2.0;    // expansion
  constexpr double psi = 0.5;    // contraction
  constexpr double sigma = 0.5;  // shrink

  std::vector<RVector> verts(static_cast<std::size_t>(dim) + 1, x0);
  std::vector<double> fv(static_cast<std::size_t>(dim) + 1);
  for (Index i = 0; i < dim; ++i) {
    verts[static_cast<std::size_t>(i) + 1](i) += initial_step;
  }
  Index evals = 0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    fv[i] = f(verts[i]);
    ++evals;
  }
  std::vector<std::size_t> order(verts.size());
  std::iota(order.begin(), order.end(), 0);

  auto sort_simplex = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  NelderMeadResult result;
  Index iter = 0;
  for (; iter < max_iters; ++iter) {
    sort_simplex();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();

    double x_spread = 0.0;
    double f_spread = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i) {
      x_spread = std::max(
          x_spread, (verts[order[i]] - verts[best]).cwiseAbs().maxCoeff());
      f_spread = std::max(f_spread, std::abs(fv[order[i]] - fv[best]));
    }
    if (x_spread < options.xtol && f_spread < options.ftol) {
      result.converged = true;
      break;
    }

    RVector centroid = RVector::Zero(dim);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += verts[order[i]];
    centroid /= static_cast<double>(dim);

    const RVector xr = centroid + rho * (centroid - verts[worst]);
    const double fr = f(xr);
    ++evals;

    if (fr < fv[order.front()]) {
      const RVector xe = centroid + rho * chi * (centroid - verts[worst]);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        verts[worst] = xe;
        fv[worst] = fe;
      } else {
        verts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[order[order.size() - 2]]) {
      verts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    if (fr < fv[worst]) {
      // outside contraction
      const RVector xc = centroid + psi * rho * (centroid - verts[worst]);
      const double fc = f(xc);
      ++evals;
      if (fc <= fr) {
        verts[worst] = xc;
        fv[worst] = fc;
        continue;
      }
    } else {
      // inside contraction
      const RVector xcc = centroid - psi * (centroid - verts[worst]);
      const double fcc = f(xcc);
      ++evals;
      if (fcc < fv[worst]) {
        verts[worst] = xcc;
        fv[worst] = fcc;
        continue;
      }
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i < order.size(); ++i) {
      verts[order[i]] = verts[best] + sigma * (verts[order[i]] - verts[best]);
      fv[order[i]] = f(verts[order[i]]);
      ++evals;
    }
  }

  sort_simplex();
  result.x = verts[order.front()];
  result.f = fv[order.front()];
  result.iterations = iter;
  result.evaluations = evals;
  return result;
}

}  // namespace blockeig
