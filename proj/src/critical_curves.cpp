#include "nrange/critical_curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nrange {

std::vector<SlopeGroup> branch_slopes(const Matrix& a, Real theta0, Real gap_tol) {
  const SupportSample s = support_value(a, theta0, gap_tol);
  return slope_groups(a, s, default_flat_tol(a));
}

namespace {

struct Resolved {
  RealVector values;
  Matrix vectors;
};

// Full eigensystem of Re(e^{-i theta}A) with each degenerate cluster rotated onto
// the slope eigenvectors; equal-slope subclusters are aligned to `prev` (if any).
Resolved resolve(const Matrix& a, Real theta, Real gap_tol, Real flat_tol, const Matrix* prev) {
  const SpectralDecomposition sd = hermitian_eig(cartesian_part(a, theta, Part::Real));
  Resolved r{sd.eigenvalues, sd.eigenvectors};
  const Eigen::Index n = sd.size();
  Matrix im;
  Eigen::Index start = 0;
  for (Eigen::Index j = 1; j <= n; ++j) {
    if (j < n && r.values(j) - r.values(j - 1) <= gap_tol) continue;
    const Eigen::Index cnt = j - start;
    if (cnt > 1) {
      if (im.size() == 0) im = cartesian_part(a, theta, Part::Imaginary);
      Matrix q = r.vectors.middleCols(start, cnt);
      Matrix k = q.adjoint() * im * q;
      k = (k + k.adjoint()) * 0.5;
      const SpectralDecomposition ks = hermitian_eig(k);
      q = q * ks.eigenvectors;
      Eigen::Index s0 = 0;
      for (Eigen::Index i = 1; i <= cnt; ++i) {
        if (i < cnt && ks.eigenvalues(i) - ks.eigenvalues(i - 1) <= flat_tol) continue;
        const Eigen::Index sc = i - s0;
        if (sc > 1 && prev != nullptr && prev->cols() > 0) {
          Matrix sub = q.middleCols(s0, sc);
          const Matrix mm = sub.adjoint() * (*prev);
          Eigen::JacobiSVD<Matrix> svd(mm, Eigen::ComputeFullU);
          q.middleCols(s0, sc) = sub * svd.matrixU();
        }
        s0 = i;
      }
      r.vectors.middleCols(start, cnt) = q;
    }
    start = j;
  }
  for (Eigen::Index j = 0; j < n; ++j) fix_phase(r.vectors.col(j));
  return r;
}

}  // namespace

BranchTracking track_branches(const Matrix& a, Real theta_a, Real theta_b, int grid_size, int top_k,
                              TrackOptions opt) {
  validate_square(a);
  if (grid_size < 64) throw InvalidInput("track_branches: grid_size must be >= 64");
  if (top_k < 1) throw InvalidInput("track_branches: top_k must be >= 1");
  if (!(theta_b > theta_a)) throw InvalidInput("track_branches: empty theta range");
  const Real gap_tol = opt.gap_tol > 0 ? opt.gap_tol : default_gap_tol(a);
  const Real flat_tol = opt.flat_tol > 0 ? opt.flat_tol : default_flat_tol(a);
  const int n = static_cast<int>(a.rows());
  top_k = std::min(top_k, n);

  BranchTracking out;
  out.grid.resize(grid_size);
  for (int j = 0; j < grid_size; ++j) out.grid[j] = theta_a + j * (theta_b - theta_a) / (grid_size - 1);

  std::vector<int> active;  // indices into out.branches
  Matrix prev;
  auto append = [&](CriticalBranch& br, int j, const Resolved& r, Eigen::Index col, const Matrix& im, Real mu) {
    const Vector x = r.vectors.col(col);
    br.theta.push_back(out.grid[j]);
    br.lambda.push_back(r.values(col));
    br.lambda_prime.push_back(x.dot(im * x).real());
    UnitVector u;
    u.components = x;
    u.norm_defect = std::abs(x.norm() - 1.0);
    br.vectors.push_back(std::move(u));
    br.is_maximal.push_back(mu - r.values(col) <= gap_tol);
  };
  auto start_branch = [&](int j) {
    CriticalBranch br;
    br.id = static_cast<int>(out.branches.size());
    br.grid_offset = j;
    out.branches.push_back(std::move(br));
    return static_cast<int>(out.branches.size()) - 1;
  };

  for (int j = 0; j < grid_size; ++j) {
    const Real th = out.grid[j];
    const Resolved r = resolve(a, th, gap_tol, flat_tol, j == 0 ? nullptr : &prev);
    const Matrix im = cartesian_part(a, th, Part::Imaginary);
    const Real mu = r.values(n - 1);
    std::vector<bool> taken(n, false);

    if (j == 0) {
      for (int t = 0; t < top_k; ++t) {
        const int b = start_branch(0);
        append(out.branches[b], 0, r, n - 1 - t, im, mu);
        taken[n - 1 - t] = true;
        active.push_back(b);
      }
    } else {
      // Greedy matching on the overlap matrix, ties by eigenvalue proximity.
      struct Pair {
        Real overlap;
        Real dlambda;
        int row;
        int col;
      };
      std::vector<Pair> pairs;
      const Matrix ov = prev.adjoint() * r.vectors;
      for (int i = 0; i < static_cast<int>(active.size()); ++i) {
        const Real lam = out.branches[active[i]].lambda.back();
        for (int c = 0; c < n; ++c) pairs.push_back({std::abs(ov(i, c)), std::abs(r.values(c) - lam), i, c});
      }
      std::sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) {
        if (std::abs(p.overlap - q.overlap) > 1e-12) return p.overlap > q.overlap;
        if (p.dlambda != q.dlambda) return p.dlambda < q.dlambda;
        return p.col > q.col;
      });
      std::vector<int> match(active.size(), -1);
      std::vector<Real> best(active.size(), 0.0);
      for (const Pair& p : pairs) {
        if (match[p.row] >= 0 || taken[p.col]) continue;
        best[p.row] = std::max(best[p.row], p.overlap);
        if (p.overlap < opt.overlap_threshold) continue;
        match[p.row] = p.col;
        taken[p.col] = true;
      }
      std::vector<int> next_active;
      int lost = 0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const int b = active[i];
        if (match[i] >= 0) {
          append(out.branches[b], j, r, match[i], im, mu);
          next_active.push_back(b);
          continue;
        }
        // Best overlap this branch could still reach among all columns.
        Real reach = 0.0;
        for (int c = 0; c < n; ++c) reach = std::max(reach, std::abs(ov(static_cast<Eigen::Index>(i), c)));
        if (opt.strict) throw BranchLost("branch lost during continuation", th, reach);
        out.crossings.push_back({th, out.branches[b].id, reach});
        ++lost;
      }
      if (opt.restart) {
        for (int l = 0; l < lost; ++l) {
          int col = -1;
          for (int c = n - 1; c >= 0; --c)
            if (!taken[c]) {
              col = c;
              break;
            }
          if (col < 0) break;
          const int b = start_branch(j);
          append(out.branches[b], j, r, col, im, mu);
          taken[col] = true;
          next_active.push_back(b);
        }
      }
      active = std::move(next_active);
    }
    prev.resize(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i)
      prev.col(static_cast<Eigen::Index>(i)) = out.branches[active[i]].vectors.back().components;
  }
  return out;
}

std::vector<Complex> curve_points(const CriticalBranch& b) {
  std::vector<Complex> out(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) out[j] = support_point(b.theta[j], b.lambda[j], b.lambda_prime[j]);
  return out;
}

CurvesThrough curves_through(const std::vector<CriticalBranch>& branches, Complex z, Real tol, bool maximal_only) {
  CurvesThrough out;
  for (const auto& br : branches) {
    const std::vector<Complex> pts = curve_points(br);
    struct Run {
      int first;
      int last;
      int closest;
      Real dist;
    };
    std::vector<Run> runs;
    for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
      if (maximal_only && !br.is_maximal[j]) continue;
      const Real d = std::abs(pts[j] - z);
      if (d > tol) continue;
      if (!runs.empty() && j - runs.back().last <= 10) {
        runs.back().last = j;
        if (d < runs.back().dist) runs.back().closest = j, runs.back().dist = d;
      } else {
        runs.push_back({j, j, j, d});
      }
    }
    // A branch covering a full turn: merge passages that meet across the seam.
    if (runs.size() > 1 && !br.theta.empty()) {
      const Real span = br.theta.back() - br.theta.front();
      const Real step = br.size() > 1 ? span / (br.size() - 1) : 0.0;
      const int n = static_cast<int>(br.size());
      if (std::abs(span + step - kTwoPi) <= 1e-9 || std::abs(span - kTwoPi) <= 1e-9) {
        const int wrap_gap = runs.front().first + (n - 1 - runs.back().last);
        if (wrap_gap <= 10) {
          if (runs.back().dist < runs.front().dist) runs.front().closest = runs.back().closest, runs.front().dist = runs.back().dist;
          runs.pop_back();
        }
      }
    }
    for (const Run& r : runs) {
      out.branch_ids.push_back(br.id);
      out.thetas.push_back(br.theta[r.closest]);
    }
  }
  out.count = static_cast<int>(out.branch_ids.size());
  return out;
}

void tag_arcs(BoundaryModel& model, const std::vector<CriticalBranch>& branches) {
  const Real h = model.grid_step();
  const Real tol = 1e-6 * (1.0 + model.norm2);
  for (Arc& arc : model.arcs) {
    const Real mid = std::fmod(0.5 * (arc.theta_begin + arc.theta_end), kTwoPi);
    const int k = static_cast<int>(std::lround(mid / h)) % model.grid_size;
    const Complex target = boundary_point(model.a, k * h, false, model.gap_tol, model.flat_tol);
    Real best = std::numeric_limits<Real>::infinity();
    for (const auto& br : branches) {
      if (br.size() < 2) continue;
      for (Real shift : {0.0, kTwoPi, -kTwoPi}) {
        const Real th = k * h + shift;
        if (th < br.theta.front() || th > br.theta.back()) continue;
        const Real step = (br.theta.back() - br.theta.front()) / (br.size() - 1);
        const int j = static_cast<int>(std::lround((th - br.theta.front()) / step));
        if (j < 0 || j >= static_cast<int>(br.size()) || !br.is_maximal[j]) continue;
        const Real d = std::abs(support_point(br.theta[j], br.lambda[j], br.lambda_prime[j]) - target) +
                       std::abs(br.theta[j] - th) * model.norm2;
        if (d < best && d <= tol + step * model.norm2) {
          best = d;
          arc.branch_id = br.id;
        }
      }
    }
  }
}

}  // namespace nrange
