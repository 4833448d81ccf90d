#include "rfc/weaknorm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rfc/groundstate.hpp"
#include "rfc/maxflow.hpp"
#include "rfc/parallel.hpp"
#include "rfc/rng.hpp"

namespace rfc {

namespace {

constexpr double kDinkelbachTol = 1e-12;

// A ball instance with its cut topology built once per radius; Dinkelbach
// iterations refill capacities only, and the field values are re-read when
// the ball is recentered. Cells are stored as offsets from the center, so an
// optimizer found at one center is a valid (ratio-attaining) competitor at
// any other center of the same radius: the perimeter is unchanged and only
// the field integral needs re-evaluation. That translation property drives
// the warm starts below.
struct BallProblem {
  int ir = 0;  // bounding half-width
  Cell center{0, 0};
  std::vector<Cell> offs;       // cell offsets from the center
  std::vector<double> xi;       // field value per cell at the current center
  std::vector<double> boundary; // stencil weight to out-of-ball neighbors
  struct PairEdge {
    int i, j;
    double w;
    int edge;
  };
  std::vector<PairEdge> pairs;
  BKSolver solver;
  std::vector<int> index;  // (2ir+1)^2 offset grid, -1 outside the ball

  int idx_off(int ox, int oy) const {
    const int u = ox + ir, v = oy + ir;
    if (u < 0 || v < 0 || u > 2 * ir || v > 2 * ir) return -1;
    return index[static_cast<std::size_t>(v) * (2 * ir + 1) + u];
  }
};

void build_ball_topology(BallProblem& prob, double R, const Stencil& stencil) {
  if (R < 1.0) throw std::invalid_argument("s_r: R < 1");
  prob.ir = static_cast<int>(std::ceil(R));
  prob.offs = ball_cells({0, 0}, R);
  const int side = 2 * prob.ir + 1;
  prob.index.assign(static_cast<std::size_t>(side) * side, -1);
  for (std::size_t k = 0; k < prob.offs.size(); ++k)
    prob.index[static_cast<std::size_t>(prob.offs[k].y + prob.ir) * side +
               (prob.offs[k].x + prob.ir)] = static_cast<int>(k);

  const int n = static_cast<int>(prob.offs.size());
  prob.xi.assign(n, 0.0);
  prob.boundary.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (const StencilDir& d : stencil.dirs()) {
      const Cell c = prob.offs[i];
      const int j = prob.idx_off(c.x + d.dx, c.y + d.dy);
      if (j >= 0)
        prob.pairs.push_back({i, j, d.weight, -1});
      else
        prob.boundary[i] += d.weight;
      if (prob.idx_off(c.x - d.dx, c.y - d.dy) < 0)
        prob.boundary[i] += d.weight;
    }

  prob.solver.init(n, static_cast<int>(prob.pairs.size()));
  for (auto& p : prob.pairs) p.edge = prob.solver.add_edge(p.i, p.j);
  prob.solver.finish_topology();
}

// Per-thread topology cache keyed by (radius, stencil); the expensive CSR
// build happens once per distinct radius.
BallProblem& cached_ball(double R, const Stencil& stencil) {
  thread_local std::map<std::pair<long, int>, BallProblem> cache;
  const std::pair<long, int> key{static_cast<long>(R * 4096.0),
                                 static_cast<int>(stencil.kind())};
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, BallProblem{}).first;
    build_ball_topology(it->second, R, stencil);
  }
  return it->second;
}

void recenter(BallProblem& prob, const NoiseField& noise, Cell center) {
  prob.center = center;
  for (std::size_t k = 0; k < prob.offs.size(); ++k) {
    const int x = center.x + prob.offs[k].x, y = center.y + prob.offs[k].y;
    if (x < 0 || x >= noise.width || y < 0 || y >= noise.height)
      throw std::invalid_argument("s_r: ball exceeds the noise extent");
    prob.xi[k] = noise.at(x, y);
  }
}

double perimeter_of(const BallProblem& prob,
                    const std::vector<std::uint8_t>& in_set) {
  double per = 0.0;
  for (std::size_t i = 0; i < in_set.size(); ++i)
    if (in_set[i]) per += prob.boundary[i];
  for (const auto& p : prob.pairs)
    if (in_set[p.i] != in_set[p.j]) per += p.w;
  return per;
}

struct SignedOutcome {
  double lambda = 0.0;
  std::vector<Cell> opt;  // offsets from the center; empty = no optimizer
  double perimeter = 0.0;
  int iterations = 0;
};

// If `offs` (a set from the same or a nested ball, with known perimeter)
// attains a better signed ratio at the current center, adopt it as the
// Dinkelbach starting point.
void improve_init(const BallProblem& prob, int sign,
                  const std::vector<Cell>& offs, double per,
                  SignedOutcome& init) {
  if (offs.empty() || per <= 0.0) return;
  double integral = 0.0;
  for (const Cell& o : offs) {
    const int i = prob.idx_off(o.x, o.y);
    if (i < 0) return;
    integral += prob.xi[i];
  }
  const double v = sign * integral / per;
  if (v > init.lambda) {
    init.lambda = v;
    init.opt = offs;
    init.perimeter = per;
  }
}

// Dinkelbach run for max_M (sign * int_M xi) / per(M), starting from `init`
// (whose lambda must be attained by init.opt, or be 0 with no optimizer).
SignedOutcome run_signed(BallProblem& prob, int sign, SignedOutcome init) {
  SignedOutcome out = std::move(init);
  out.iterations = 0;
  const int n = static_cast<int>(prob.offs.size());
  bool any_positive = false;
  for (int i = 0; i < n; ++i)
    if (sign * prob.xi[i] > 0.0) {
      any_positive = true;
      break;
    }
  // With no positive signed mass no set beats out.lambda >= 0; skip the run.
  if (!any_positive) return out;

  // Capacities are set once at the starting lambda; later iterations only
  // raise lambda, which maps to monotone capacity bumps (a node-cost increase
  // is added sink capacity up to a constant), so the flow found so far stays
  // feasible and each re-solve augments incrementally. The affine offset
  // `base` is fixed by the starting capacities and never changes.
  prob.solver.begin_caps();
  for (const auto& p : prob.pairs)
    prob.solver.set_edge_cap(p.edge, out.lambda * p.w, out.lambda * p.w);
  double base = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = out.lambda * prob.boundary[i] - sign * prob.xi[i];
    if (c >= 0.0)
      prob.solver.add_terminal_cap(i, 0.0, c);
    else {
      prob.solver.add_terminal_cap(i, -c, 0.0);
      base += c;
    }
  }

  std::vector<std::uint8_t> side;
  double lambda_caps = out.lambda;
  for (;;) {
    const double flow = prob.solver.solve();
    ++out.iterations;
    const double best_gain = -(flow + base);  // max_M (s int - lambda per)
    if (best_gain <= kDinkelbachTol) break;

    prob.solver.source_side(side);
    double integral = 0.0;
    for (int i = 0; i < n; ++i)
      if (side[i]) integral += sign * prob.xi[i];
    const double per = perimeter_of(prob, side);
    const double next = integral / per;
    if (!(next > out.lambda)) break;  // float-noise guard
    out.lambda = next;
    out.perimeter = per;
    out.opt.clear();
    for (int i = 0; i < n; ++i)
      if (side[i]) out.opt.push_back(prob.offs[i]);

    const double dl = next - lambda_caps;
    for (const auto& p : prob.pairs)
      prob.solver.bump_edge_cap(p.edge, dl * p.w, dl * p.w);
    for (int i = 0; i < n; ++i)
      if (prob.boundary[i] > 0.0)
        prob.solver.bump_sink_cap(i, dl * prob.boundary[i]);
    lambda_caps = next;
  }
  return out;
}

WeakNormResult finish(const BallProblem& prob, const Stencil& stencil,
                      const SignedOutcome& plus, const SignedOutcome& minus) {
  WeakNormResult res;
  res.iterations = plus.iterations + minus.iterations;
  const bool take_plus = plus.lambda >= minus.lambda;
  const SignedOutcome& win = take_plus ? plus : minus;
  if (win.opt.empty()) {
    // xi vanishes identically on the ball: designated single-cell optimizer.
    res.value = 0.0;
    res.sign = +1;
    res.optimizer = {prob.center};
    res.perimeter = stencil.cell_perimeter();
    return res;
  }
  res.value = win.lambda;
  res.sign = take_plus ? +1 : -1;
  res.perimeter = win.perimeter;
  for (const Cell& o : win.opt)
    res.optimizer.push_back({prob.center.x + o.x, prob.center.y + o.y});
  return res;
}

SignedOutcome init_from_cells(const BallProblem& prob, int sign,
                              const std::vector<Cell>& cells) {
  SignedOutcome init;
  if (cells.empty()) return init;
  std::vector<std::uint8_t> mask(prob.offs.size(), 0);
  std::vector<Cell> offs;
  for (const Cell& c : cells) {
    const int i =
        prob.idx_off(c.x - prob.center.x, c.y - prob.center.y);
    if (i < 0) return init;  // not contained in this ball: discard
    mask[i] = 1;
    offs.push_back({c.x - prob.center.x, c.y - prob.center.y});
  }
  improve_init(prob, sign, offs, perimeter_of(prob, mask), init);
  return init;
}

}  // namespace

WeakNormResult s_r(const NoiseField& noise, double R, Cell center,
                   const Stencil& stencil) {
  BallProblem& prob = cached_ball(R, stencil);
  recenter(prob, noise, center);
  const SignedOutcome plus = run_signed(prob, +1, {});
  const SignedOutcome minus = run_signed(prob, -1, {});
  return finish(prob, stencil, plus, minus);
}

WeakNormResult s_r_warm(const NoiseField& noise, double R, Cell center,
                        const Stencil& stencil, WeakNormWarmStart& warm) {
  BallProblem& prob = cached_ball(R, stencil);
  recenter(prob, noise, center);
  const SignedOutcome plus =
      run_signed(prob, +1, init_from_cells(prob, +1, warm.opt_plus));
  const SignedOutcome minus =
      run_signed(prob, -1, init_from_cells(prob, -1, warm.opt_minus));

  warm.lambda_plus = plus.lambda;
  warm.lambda_minus = minus.lambda;
  warm.opt_plus.clear();
  for (const Cell& o : plus.opt)
    warm.opt_plus.push_back({center.x + o.x, center.y + o.y});
  warm.opt_minus.clear();
  for (const Cell& o : minus.opt)
    warm.opt_minus.push_back({center.x + o.x, center.y + o.y});
  return finish(prob, stencil, plus, minus);
}

PinnedScales pinned_sup_scales(const NoiseField& noise, Cell center, int R_max,
                               const Stencil& stencil) {
  if (R_max < 2) throw std::invalid_argument("pinned_sup_scales: R_max < 2");
  PinnedScales res;
  WeakNormWarmStart warm;
  for (int R = 2; R <= R_max; R *= 2) {
    const WeakNormResult w = s_r_warm(noise, R, center, stencil, warm);
    res.per_scale.emplace_back(R, w.value);
    res.value = std::max(res.value,
                         std::pow(std::log(double(R)), -0.75) * w.value);
  }
  return res;
}

PinnedSpace pinned_sup_space(const NoiseField& noise, int R_max, int W,
                             const Stencil& stencil) {
  if (W < 0) throw std::invalid_argument("pinned_sup_space: W < 0");
  if (R_max < 2) throw std::invalid_argument("pinned_sup_space: R_max < 2");

  std::vector<int> radii;
  for (int R = 2; R <= R_max; R *= 2) radii.push_back(R);
  const std::size_t n_scales = radii.size();

  // Private per-scale problems (not the shared cache: the scan below keeps
  // per-scale state alive across base points).
  std::vector<BallProblem> probs(n_scales);
  for (std::size_t s = 0; s < n_scales; ++s)
    build_ball_topology(probs[s], radii[s], stencil);

  // Warm-start state: the previous base point's optimizer per (scale, sign)
  // translates to the current point, and the smaller scale's optimizer at
  // the same point nests into the larger ball.
  std::vector<SignedOutcome> prev_plus(n_scales), prev_minus(n_scales);

  PinnedSpace res;
  bool first = true;
  for (int y = -W; y <= W; ++y)
    for (int x = -W; x <= W; ++x) {
      const double r = std::hypot(double(x), double(y));
      if (r > double(W)) continue;
      const Cell base{noise.origin_x + x, noise.origin_y + y};

      double pinned_scales = 0.0;
      for (std::size_t s = 0; s < n_scales; ++s) {
        BallProblem& prob = probs[s];
        recenter(prob, noise, base);

        SignedOutcome ip, im;
        improve_init(prob, +1, prev_plus[s].opt, prev_plus[s].perimeter, ip);
        improve_init(prob, -1, prev_minus[s].opt, prev_minus[s].perimeter,
                     im);
        if (s > 0) {
          improve_init(prob, +1, prev_plus[s - 1].opt,
                       prev_plus[s - 1].perimeter, ip);
          improve_init(prob, -1, prev_minus[s - 1].opt,
                       prev_minus[s - 1].perimeter, im);
        }        prev_plus[s] = run_signed(prob, +1, std::move(ip));
        prev_minus[s] = run_signed(prob, -1, std::move(im));
        const double sr =
            std::max(prev_plus[s].lambda, prev_minus[s].lambda);
        pinned_scales = std::max(
            pinned_scales, std::pow(std::log(double(radii[s])), -0.75) * sr);
      }

      const double weight = std::pow(std::log(std::max(r, 2.0)), -0.5);
      const double v = weight * pinned_scales;
      res.table.emplace_back(x, y, v);
      if (first || v > res.value) {
        res.value = v;
        res.argmax = {x, y};
        first = false;
      }
    }  return res;
}

SrSamples montecarlo_sr(double R, int n_samples, NoiseKind kind,
                        std::uint64_t master_seed, const Stencil& stencil) {
  if (n_samples < 2)
    throw std::invalid_argument("montecarlo_sr: n_samples < 2");
  if (R < 1.0) throw std::invalid_argument("montecarlo_sr: R < 1");

  const int L = 2 * static_cast<int>(std::ceil(R)) + 3;
  SrSamples out;
  out.values.assign(n_samples, 0.0);
  parallel_for(n_samples, [&](int i) {
    const std::uint64_t seed = derive_key(master_seed, i);
    const NoiseField noise = kind == NoiseKind::DiscretizedWN
                                 ? sample_discretized_wn(L, L, seed)
                                 : sample_regularized_wn(L, L, seed);
    const Cell center{noise.origin_x, noise.origin_y};
    WeakNormWarmStart warm;
    for (int r = 2; r < R; r *= 2) s_r_warm(noise, r, center, stencil, warm);
    out.values[i] = s_r_warm(noise, R, center, stencil, warm).value;
  });

  SrSummary& s = out.summary;
  double sum = 0.0;
  for (double v : out.values) sum += v;
  s.mean = sum / n_samples;
  double ss = 0.0;
  for (double v : out.values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / (n_samples - 1);
  s.normalized_mean = s.mean / std::pow(std::log(R), 0.75);

  std::vector<double> sorted = out.values;
  std::sort(sorted.begin(), sorted.end());
  for (double p : {0.25, 0.5, 0.75, 0.9, 0.99}) {
    const double pos = p * (n_samples - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - double(lo);
    s.quantiles.emplace_back(p, sorted[lo] * (1.0 - frac) + sorted[hi] * frac);
  }
  return out;
}

}  // namespace rfc
