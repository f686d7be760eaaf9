#include "dirac_green/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "dirac_green/errors.hpp"

namespace dg {

void Window::validate() const {
  if (!(x1 < x2)) throw std::invalid_argument("Window: x1 < x2 required");
  if (x_count < 1) throw std::invalid_argument("Window: x_count >= 1 required");
  if (eps.empty()) throw std::invalid_argument("Window: eps grid empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw std::invalid_argument("Window: eps > 0 required");
    if (i > 0 && !(eps[i] < eps[i - 1])) {
      throw std::invalid_argument("Window: eps must be strictly decreasing");
    }
  }
}

std::vector<double> Window::grid() const {
  // Endpoints excluded: x_j = x1 + j h, j = 1..x_count, h = (x2-x1)/(count+1).
  std::vector<double> xs(x_count);
  const double h = (x2 - x1) / (x_count + 1);
  for (int j = 0; j < x_count; ++j) xs[j] = x1 + (j + 1) * h;
  return xs;
}

std::string verdict_label(Verdict v) {
  switch (v) {
    case Verdict::BoundedEvidence: return "bounded_evidence";
    case Verdict::GrowthDetected: return "growth_detected";
    default: return "inconclusive";
  }
}

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(task) for task = 0..n_tasks-1 on a small pool. Work items are
// independent; output slots are preassigned, so the schedule cannot affect
// the result.
void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn) {
  threads = std::min(resolve_threads(threads), n_tasks);
  if (threads <= 1) {
    for (int t = 0; t < n_tasks; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) {
        fn(t);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::string status_label(const std::string& error) {
  const auto colon = error.find(':');
  return colon == std::string::npos ? error : error.substr(0, colon);
}

// The scan evaluates one of three batched fast paths; anything else (spin-up
// or interior sites on a half line) goes through resolvent_entry per point.
struct EntryEvaluator {
  OperatorSpec spec;        // translated so the entry sits at the sweep origin
  bool batched = false;
  bool half_line = false;
  bool conjugated = false;  // spin-up route: evaluate at -conj(lam), flip back
  EntrySelector selector;
  OperatorSpec original;

  static EntryEvaluator make(const OperatorSpec& spec, const EntrySelector& sel) {
    EntryEvaluator ev;
    ev.original = spec;
    ev.selector = sel;
    if (spec.lattice.is_half_line()) {
      ev.half_line = true;
      ev.spec = spec;
      ev.batched = (spec.mode == Mode::Jacobi || sel.spin == Spin::Down) &&
                   sel.site == spec.lattice.start;
      return ev;
    }
    ev.spec = spec;
    ev.spec.pot = shift_potential(spec.pot, sel.site);
    if (spec.mode == Mode::Jacobi || sel.spin == Spin::Down) {
      ev.batched = true;
    } else {
      ev.batched = true;
      ev.conjugated = true;
      ev.spec = charge_conjugate(ev.spec);
    }
    return ev;
  }

  void run(std::span<const cplx> lams, const GreenOptions& opts,
           std::span<GreenOutcome> out) const {
    if (batched) {
      std::vector<cplx> ls(lams.begin(), lams.end());
      if (conjugated) {
        for (cplx& l : ls) l = -std::conj(l);
      }
      if (half_line) {
        half_line_green_batch(spec, spec.lattice.start, ls, opts, out);
      } else {
        glue_full_line_batch(spec, ls, opts, out);
      }
      if (conjugated) {
        for (auto& o : out) {
          if (o.ok()) o.result.value = -std::conj(o.result.value);
        }
      }
      return;
    }
    for (std::size_t i = 0; i < lams.size(); ++i) {
      out[i] = GreenOutcome{};
      try {
        SpinorIndex e{selector.site, selector.spin};
        out[i].result.value = resolvent_entry(original, lams[i], e, e, opts);
        out[i].result.seed_used = opts.seed;
      } catch (const std::exception& ex) {
        out[i].error = ex.what();
      }
    }
  }
};

}  // namespace

ScanReport scan_window(const OperatorSpec& spec, const Window& window,
                       const EntrySelector& selector, const ScanOptions& opts) {
  window.validate();
  const std::vector<double> xs = window.grid();
  const int nx = window.x_count;
  const int ne = static_cast<int>(window.eps.size());

  ScanReport rep;
  rep.window = window;
  rep.selector = selector;
  rep.points.assign(static_cast<std::size_t>(nx) * ne, ScanPoint{});

  const EntryEvaluator ev = EntryEvaluator::make(spec, selector);
  const int width =
      std::max(1, kernels::select_kernel(opts.green.kernel).width);

  // Tasks are fixed-width runs of consecutive x points within one eps row;
  // the partition does not depend on the thread count.
  const int groups_per_row = (nx + width - 1) / width;
  const int n_tasks = groups_per_row * ne;

  parallel_for(n_tasks, opts.threads, [&](int task) {
    const int ei = task / groups_per_row;
    const int g = task % groups_per_row;
    const int x0 = g * width;
    const int n = std::min(width, nx - x0);
    std::vector<cplx> lams(n);
    for (int j = 0; j < n; ++j) lams[j] = cplx(xs[x0 + j], window.eps[ei]);
    std::vector<GreenOutcome> out(n);
    ev.run(lams, opts.green, out);
    for (int j = 0; j < n; ++j) {
      ScanPoint& pt =
          rep.points[static_cast<std::size_t>(ei) * nx + x0 + j];
      pt.x = xs[x0 + j];
      pt.eps = window.eps[ei];
      if (out[j].ok()) {
        pt.g = out[j].result.value;
        pt.dist_to_i = hyp_dist(HalfPlanePoint(pt.g), HalfPlanePoint::unit_i());
        pt.status = "ok";
      } else {
        pt.g = out[j].result.value;
        pt.status = status_label(out[j].error);
      }
    }
  });

  rep.sup_abs_g.assign(ne, 0.0);
  rep.level_complete.assign(ne, true);
  for (int ei = 0; ei < ne; ++ei) {
    double sup = 0.0;
    bool complete = true;
    for (int j = 0; j < nx; ++j) {
      const ScanPoint& pt = rep.at(ei, j);
      if (pt.ok()) {
        sup = std::max(sup, std::abs(pt.g));
      } else {
        complete = false;
      }
    }
    rep.sup_abs_g[ei] = sup;
    rep.level_complete[ei] = complete;
  }

  try {
    const VerdictFit fit = boundedness_verdict(rep, opts.thresholds);
    rep.verdict = fit.verdict;
    rep.growth_exponent = fit.exponent;
  } catch (const InsufficientData&) {
    rep.verdict = Verdict::Inconclusive;
    rep.growth_exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

VerdictFit boundedness_verdict(const ScanReport& report,
                               const VerdictThresholds& th) {
  const int ne = static_cast<int>(report.window.eps.size());
  if (ne < 3) {
    throw InsufficientData("boundedness_verdict: need at least 3 eps levels");
  }
  std::vector<double> lx, ly, es, ss;
  for (int ei = 0; ei < ne; ++ei) {
    if (!report.level_complete[ei] || !(report.sup_abs_g[ei] > 0.0)) continue;
    lx.push_back(std::log(1.0 / report.window.eps[ei]));
    ly.push_back(std::log(report.sup_abs_g[ei]));
    es.push_back(report.window.eps[ei]);
    ss.push_back(report.sup_abs_g[ei]);
  }
  VerdictFit fit;
  fit.levels_used = static_cast<int>(lx.size());
  if (fit.levels_used < 2) {
    fit.verdict = Verdict::Inconclusive;
    fit.exponent = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < fit.levels_used; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= fit.levels_used;
  my /= fit.levels_used;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < fit.levels_used; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.exponent = sxy / sxx;

  // Ratio of sup at the smallest complete eps over the largest one.
  const auto [min_it, max_it] = std::minmax_element(es.begin(), es.end());
  const double ratio =
      ss[min_it - es.begin()] / ss[max_it - es.begin()];

  if (fit.exponent < th.bounded_exponent && ratio < th.bounded_ratio) {
    fit.verdict = Verdict::BoundedEvidence;
  } else if (fit.exponent > th.growth_exponent) {
    fit.verdict = Verdict::GrowthDetected;
  } else {
    fit.verdict = Verdict::Inconclusive;
  }
  return fit;
}

std::vector<DensityPoint> density_profile(const OperatorSpec& spec,
                                          const Window& window, double eps,
                                          long site, const ScanOptions& opts) {
  if (!(eps > 0.0)) throw std::invalid_argument("density_profile: eps > 0");
  Window w = window;
  if (w.eps.empty()) w.eps = {eps};
  w.validate();
  const std::vector<double> xs = w.grid();
  std::vector<DensityPoint> out(xs.size());

  parallel_for(static_cast<int>(xs.size()), opts.threads, [&](int j) {
    DensityPoint& d = out[j];
    d.x = xs[j];
    const cplx lam(xs[j], eps);
    try {
      const SpinorIndex down{site, Spin::Down};
      d.rho_down = resolvent_entry(spec, lam, down, down, opts.green).imag() / M_PI;
      if (spec.mode == Mode::Dirac) {
        const SpinorIndex up{site, Spin::Up};
        d.rho_up = resolvent_entry(spec, lam, up, up, opts.green).imag() / M_PI;
      }
      d.rho_total = d.rho_up + d.rho_down;
    } catch (const std::exception& ex) {
      d.status = status_label(ex.what());
    }
  });
  return out;
}

}  // namespace dg
