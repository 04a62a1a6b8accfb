#include "ptsol/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "ptsol/error.hpp"

namespace ptsol {

void set_parameter(Knowns& knowns, const std::string& name, double value) {
  if (name == "a") knowns.a = value;
  else if (name == "b") knowns.b = value;
  else if (name == "kappa") knowns.kappa = value;
  else if (name == "g1") knowns.g1 = value;
  else if (name == "g2") knowns.g2 = value;
  else if (name == "v1") knowns.v1 = value;
  else if (name == "phi0") knowns.phi0 = value;
  else throw Error(ErrorCode::InvalidArgument, "unknown sweep parameter '" + name + "'");
}

namespace {

SweepPoint evaluate_point(const Knowns& base, const Grid& grid, const std::string& parameter,
                          double value, const SpectrumOptions& options) {
  SweepPoint point;
  point.value = value;
  try {
    Knowns knowns = base;
    set_parameter(knowns, parameter, value);
    point.model = solve_constraints(knowns);
    StabilityAnalysis analysis = analyze_stability(*point.model, grid, options);
    for (int idx : analysis.partition.discrete) {
      const CertifiedPair& pair = analysis.spectrum.pairs[idx];
      point.discrete.push_back({pair.eta, pair.vector});
    }
    point.report = std::move(analysis.report);
  } catch (const std::exception& e) {
    point.report.reset();
    point.discrete.clear();
    point.error = e.what();
  }
  return point;
}

}  // namespace

SweepResult run_sweep(const Knowns& base, const Grid& grid, const std::string& parameter,
                      double start, double stop, int steps, const SweepOptions& options) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one step");
  std::vector<double> values(steps);
  for (int k = 0; k < steps; ++k)
    values[k] = steps == 1 ? start : start + (stop - start) * k / (steps - 1);
  return run_sweep_values(base, grid, parameter, values, options);
}

SweepResult run_sweep_values(const Knowns& base, const Grid& grid, const std::string& parameter,
                             const std::vector<double>& values, const SweepOptions& options) {
  // Validate the name up front: a typo is a configuration error, not a per-point failure.
  Knowns probe = base;
  set_parameter(probe, parameter, values.empty() ? 0.0 : values.front());

  SweepResult result;
  result.parameter = parameter;
  result.values = values;
  result.points.resize(values.size());

  int workers = options.workers > 0 ? options.workers
                                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max<int>(1, static_cast<int>(values.size())));

  // Each point writes only its own slot, so the result does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++)
      result.points[k] = evaluate_point(base, grid, parameter, values[k], options.spectrum);
  };
  std::vector<std::future<void>> pool;
  for (int w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();

  result.trajectories = build_trajectories(result.points, options.match_tol);
  return result;
}

std::vector<Trajectory> build_trajectories(const std::vector<SweepPoint>& points,
                                           double match_tol) {
  std::vector<Trajectory> done;
  std::vector<Trajectory> active;
  int prev = -1;
  for (int p = 0; p < static_cast<int>(points.size()); ++p) {
    const SweepPoint& cur = points[p];
    if (!cur.ok()) continue;
    const int modes = static_cast<int>(cur.discrete.size());
    std::vector<int> owner(modes, -1);

    if (prev >= 0) {
      struct Candidate {
        int traj;
        int mode;
        double dist;
        double overlap;
      };
      std::vector<Candidate> cands;
      for (int t = 0; t < static_cast<int>(active.size()); ++t) {
        const TrajectoryNode& last = active[t].back();
        const DiscreteMode& from = points[last.point].discrete[last.mode];
        for (int m = 0; m < modes; ++m) {
          const double d = std::abs(cur.discrete[m].eta - from.eta);
          if (d >= match_tol) continue;
          const double ov = from.vector.size() == cur.discrete[m].vector.size()
                                ? std::abs(from.vector.dot(cur.discrete[m].vector))
                                : 0.0;
          cands.push_back({t, m, d, ov});
        }
      }
      std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) {
        if (l.dist != r.dist) return l.dist < r.dist;
        if (l.traj != r.traj) return l.traj < r.traj;
        return l.mode < r.mode;
      });
      // Distances within tie_eps of each other are a tie; the larger overlap wins.
      const double tie_eps = 1e-9 * std::max(1.0, match_tol);
      for (std::size_t i = 0; i < cands.size();) {
        std::size_t j = i + 1;
        while (j < cands.size() && cands[j].dist - cands[i].dist <= tie_eps) ++j;
        std::stable_sort(cands.begin() + i, cands.begin() + j,
                         [](const Candidate& l, const Candidate& r) { return l.overlap > r.overlap; });
        i = j;
      }
      std::vector<bool> traj_taken(active.size(), false);
      for (const Candidate& c : cands) {
        if (traj_taken[c.traj] || owner[c.mode] >= 0) continue;
        traj_taken[c.traj] = true;
        owner[c.mode] = c.traj;
      }
      std::vector<Trajectory> kept;
      std::vector<int> remap(active.size(), -1);
      for (int t = 0; t < static_cast<int>(active.size()); ++t) {
        if (traj_taken[t]) {
          remap[t] = static_cast<int>(kept.size());
          kept.push_back(std::move(active[t]));
        } else {
          done.push_back(std::move(active[t]));
        }
      }
      active = std::move(kept);
      for (int& o : owner)
        if (o >= 0) o = remap[o];
    }

    for (int m = 0; m < modes; ++m) {
      const TrajectoryNode node{p, m, cur.discrete[m].eta};
      if (owner[m] >= 0) {
        active[owner[m]].push_back(node);
      } else {
        active.push_back({node});
      }
    }
    prev = p;
  }
  for (auto& t : active) done.push_back(std::move(t));
  std::stable_sort(done.begin(), done.end(), [](const Trajectory& l, const Trajectory& r) {
    if (l.front().point != r.front().point) return l.front().point < r.front().point;
    return l.front().mode < r.front().mode;
  });
  return done;
}

const char* to_string(TransitionKind kind) {
  return kind == TransitionKind::RealToImaginary ? "real_to_imaginary" : "imaginary_to_real";
}

namespace {

// Coordinates of eta relative to an axis: `along` runs on the axis, `across` off it.
struct AxisView {
  bool real_axis;
  double along(cplx eta) const { return real_axis ? eta.real() : eta.imag(); }
  double across(cplx eta) const { return real_axis ? eta.imag() : eta.real(); }
};

cplx partner_of(const SweepPoint& point, cplx eta) {
  cplx best = -eta;
  double dist = std::numeric_limits<double>::infinity();
  for (const DiscreteMode& mode : point.discrete) {
    const double d = std::abs(mode.eta + eta);
    if (d < dist) {
      dist = d;
      best = mode.eta;
    }
  }
  return best;
}

// Trajectory node following (point, mode), if any.
const TrajectoryNode* successor(const std::vector<Trajectory>& trajectories, int point, int mode) {
  for (const Trajectory& t : trajectories) {
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      if (t[k].point == point && t[k].mode == mode) return &t[k + 1];
    }
  }
  return nullptr;
}

void detect_on_axis(const SweepResult& sweep, const DetectionOptions& opt, AxisView shrink,
                    std::vector<BifurcationEvent>& events) {
  const AxisView grow{!shrink.real_axis};
  std::vector<int> ok_points;
  for (int p = 0; p < static_cast<int>(sweep.points.size()); ++p)
    if (sweep.points[p].ok()) ok_points.push_back(p);

  auto on_axis = [&](const AxisView& ax, cplx eta) { return std::abs(ax.across(eta)) < opt.axis_tol; };
  // Within axis_tol of the origin a mode sits on both axes and belongs to neither.
  auto ambiguous = [&](cplx eta) { return std::abs(eta) < opt.axis_tol; };

  for (const Trajectory& traj : sweep.trajectories) {
    for (std::size_t c = 0; c < traj.size(); ++c) {
      const cplx eta_c = traj[c].eta;
      if (!on_axis(shrink, eta_c) || std::abs(eta_c) >= opt.collision_tol) continue;
      // The collision stretch ends at the last consecutive node still near the origin.
      std::size_t end = c;
      while (end + 1 < traj.size() && on_axis(shrink, traj[end + 1].eta) &&
             std::abs(traj[end + 1].eta) < opt.collision_tol)
        ++end;
      // Walk back over the monotonically shrinking on-axis run.
      std::size_t begin = c;
      while (begin > 0 && on_axis(shrink, traj[begin - 1].eta) &&
             std::abs(traj[begin - 1].eta) >= std::abs(traj[begin].eta))
        --begin;
      const cplx eta_b = traj[begin].eta;
      const bool started_far = std::abs(eta_b) >= opt.collision_tol && shrink.along(eta_b) > 0.0;
      if (!started_far) {
        c = end;
        continue;
      }
      std::size_t last_clean = begin;
      for (std::size_t k = begin; k <= end; ++k)
        if (!ambiguous(traj[k].eta)) last_clean = k;

      const int end_point = traj[end].point;
      const auto pos = std::find(ok_points.begin(), ok_points.end(), end_point) - ok_points.begin();
      bool found = false;
      for (int step = 1; step <= opt.lookahead && !found; ++step) {
        if (pos + step >= static_cast<long>(ok_points.size())) break;
        const int q = ok_points[pos + step];
        const SweepPoint& point = sweep.points[q];
        int best = -1;
        for (int m = 0; m < static_cast<int>(point.discrete.size()); ++m) {
          const cplx eta = point.discrete[m].eta;
          if (!on_axis(grow, eta) || grow.along(eta) <= opt.axis_tol || ambiguous(eta)) continue;
          if (const TrajectoryNode* nxt = successor(sweep.trajectories, q, m)) {
            if (std::abs(nxt->eta) < std::abs(eta)) continue;
          }
          if (best < 0 || std::abs(eta) < std::abs(point.discrete[best].eta)) best = m;
        }
        if (best < 0) continue;
        found = true;

        const SweepPoint& before = sweep.points[traj[last_clean].point];
        const cplx shrinking = traj[last_clean].eta;
        const cplx emerging = point.discrete[best].eta;
        BifurcationEvent ev;
        ev.param_low = before.value;
        ev.param_high = point.value;
        if (shrink.real_axis) {
          ev.kind = TransitionKind::RealToImaginary;
          ev.real_pair[0] = shrinking;
          ev.real_pair[1] = partner_of(before, shrinking);
          ev.imaginary_pair[0] = emerging;
          ev.imaginary_pair[1] = partner_of(point, emerging);
        } else {
          ev.kind = TransitionKind::ImaginaryToReal;
          ev.imaginary_pair[0] = shrinking;
          ev.imaginary_pair[1] = partner_of(before, shrinking);
          ev.real_pair[0] = emerging;
          ev.real_pair[1] = partner_of(point, emerging);
        }
        const bool duplicate = std::any_of(events.begin(), events.end(), [&](const BifurcationEvent& e) {
          return e.param_low == ev.param_low && e.param_high == ev.param_high && e.kind == ev.kind;
        });
        if (!duplicate) events.push_back(ev);
      }
      c = end;
    }
  }
}

}  // namespace

std::vector<BifurcationEvent> detect_bifurcation(const SweepResult& sweep,
                                                 const DetectionOptions& options) {
  std::vector<BifurcationEvent> events;
  detect_on_axis(sweep, options, AxisView{true}, events);
  detect_on_axis(sweep, options, AxisView{false}, events);
  std::stable_sort(events.begin(), events.end(), [](const BifurcationEvent& l, const BifurcationEvent& r) {
    return std::min(l.param_low, l.param_high) < std::min(r.param_low, r.param_high);
  });
  return events;
}

std::optional<BifurcationEvent> refine_event(const Knowns& base, const Grid& grid,
                                             const std::string& parameter,
                                             const BifurcationEvent& event,
                                             const SweepOptions& sweep_options,
                                             const DetectionOptions& options) {
  // One original step on either side keeps the approach run visible; inside,
  // the step is a quarter of the original one.
  const double step = event.param_high - event.param_low;
  if (step == 0.0) return std::nullopt;
  std::vector<double> values;
  for (int k = -4; k <= 8; ++k) values.push_back(event.param_low + step * k / 4.0);
  const SweepResult fine = run_sweep_values(base, grid, parameter, values, sweep_options);
  for (const BifurcationEvent& e : detect_bifurcation(fine, options)) {
    if (e.kind == event.kind) return e;
  }
  return std::nullopt;
}

}  // namespace ptsol
