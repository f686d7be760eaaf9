#include "dirac_green/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "dirac_green/green.hpp"
#include "dirac_green/oracle.hpp"
#include "dirac_green/rng.hpp"

namespace dg {

double VerifyCaseResult::max_error() const {
  return std::max(err_half, std::max(err_glue, err_up));
}

namespace {

PotentialPair draw_potential(Rng& rng, int case_idx) {
  PotentialPair p;
  const double power = rng.uniform(1.0, 2.0);
  p.v1 = PotentialComponent::power(rng.uniform(-3.0, 3.0), power);
  p.v2 = PotentialComponent::power(rng.uniform(-3.0, 3.0), power);
  const bool with_w = (case_idx % 4) >= 2;
  if (with_w) {
    // |W| stays well away from the forbidden values -1 and +1.
    const cplx w1(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    const cplx w2(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    p.w1 = PotentialComponent::power(w1, power);
    p.w2 = PotentialComponent::power(w2, power);
  } else {
    rng.uniform();
    rng.uniform();
    rng.uniform();
    rng.uniform();
  }
  return p;
}

OperatorSpec make_spec(const PotentialPair& p, double m, bool full_line) {
  OperatorSpec s;
  s.mode = Mode::Dirac;
  s.m = m;
  s.lattice = full_line ? Lattice::full_line() : Lattice::half_line(0);
  s.pot = p;
  s.nu1 = 1;
  s.nu2 = 1;
  return s;
}

std::vector<cplx> lambda_grid(double m) {
  const double lo = m;
  const double hi = std::sqrt(m * m + 4.0);
  std::vector<cplx> lams;
  for (int j = 1; j <= 5; ++j) {
    const double x = lo + j * (hi - lo) / 6.0;
    for (double e : {0.3, 0.5, 1.0}) lams.emplace_back(x, e);
  }
  return lams;
}

}  // namespace

std::vector<OperatorSpec> verify_case_specs(int n_cases, std::uint64_t rng_seed,
                                            bool full_line) {
  Rng rng(rng_seed);
  std::vector<OperatorSpec> specs;
  specs.reserve(n_cases);
  for (int c = 0; c < n_cases; ++c) {
    const PotentialPair p = draw_potential(rng, c);
    specs.push_back(make_spec(p, c % 2 == 0 ? 0.0 : 1.0, full_line));
  }
  return specs;
}

VerifyReport run_verify_suite(const VerifyOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();

  VerifyReport rep;
  rep.tolerance = opts.tolerance;
  rep.section_n = opts.section_n;
  rep.cases.resize(opts.n_cases);

  Rng rng(opts.rng_seed);
  std::vector<PotentialPair> pots;
  std::vector<bool> with_w;
  std::vector<double> powers;
  for (int c = 0; c < opts.n_cases; ++c) {
    Rng probe = rng;  // power drawn first inside draw_potential
    powers.push_back(probe.uniform(1.0, 2.0));
    pots.push_back(draw_potential(rng, c));
    with_w.push_back((c % 4) >= 2);
  }

  int threads = opts.threads;
  if (threads <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    threads = hc == 0 ? 1 : static_cast<int>(hc);
  }
  threads = std::min(threads, opts.n_cases);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int c = next.fetch_add(1); c < opts.n_cases; c = next.fetch_add(1)) {
      const double m = (c % 2 == 0) ? 0.0 : 1.0;
      const OperatorSpec half = make_spec(pots[c], m, false);
      const OperatorSpec full = make_spec(pots[c], m, true);
      VerifyCaseResult& r = rep.cases[c];
      r.label = "case_" + std::to_string(c);
      r.mass = m;
      r.power = powers[c];
      r.with_w = with_w[c];

      GreenOptions gopt;
      gopt.tol = 1e-12;
      const SpinorIndex down0{0, Spin::Down};
      const SpinorIndex up0{0, Spin::Up};
      for (cplx lam : lambda_grid(m)) {
        const cplx a = half_line_green(half, lam, 0, gopt).value;
        const cplx a_ref =
            finite_section_green_banded(half, lam, opts.section_n, down0, down0);
        r.err_half = std::max(r.err_half, std::abs(a - a_ref));

        const cplx g = glue_full_line(full, lam, gopt).value;
        const cplx g_ref =
            finite_section_green_banded(full, lam, opts.section_n, down0, down0);
        r.err_glue = std::max(r.err_glue, std::abs(g - g_ref));

        const cplx u = resolvent_entry(full, lam, up0, up0, gopt);
        const cplx u_ref =
            finite_section_green_banded(full, lam, opts.section_n, up0, up0);
        r.err_up = std::max(r.err_up, std::abs(u - u_ref));
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& r : rep.cases) {
    rep.max_error = std::max(rep.max_error, r.max_error());
  }
  rep.pass = rep.max_error <= rep.tolerance;
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace dg
