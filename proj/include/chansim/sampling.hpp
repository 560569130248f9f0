#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"
#include "chansim/logspace.hpp"
#include "chansim/rng.hpp"

namespace chansim {

namespace detail {

inline void require_support_subset(std::span<const double> p,
                                   std::span<const double> q,
                                   const char* where) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0 && q[i] == 0.0)
      throw Error(std::string(where) +
                  ": supp(target) must be contained in supp(proposal)");
}

}  // namespace detail

// Memoryless accept/reject plan: draw from the proposal up to
// iteration_cap times, accept with probability min{P, N Q}/(N Q).
struct RejectionPlan {
  Distribution target;
  Distribution proposal;
  long long n_budget;       // N
  long long iteration_cap;  // N~

  RejectionPlan(Distribution target_, Distribution proposal_, long long n,
                long long cap)
      : target(std::move(target_)),
        proposal(std::move(proposal_)),
        n_budget(n),
        iteration_cap(cap) {
    if (target.size() != proposal.size())
      throw AlphabetMismatchError("RejectionPlan");
    if (n_budget < 1 || iteration_cap < 1)
      throw Error("RejectionPlan: budgets must be >= 1");
    detail::require_support_subset(target.probs(), proposal.probs(),
                                   "RejectionPlan");
  }
};

// Entrywise min{P(x), N Q(x)}; total mass in (0, 1].
inline NonnegVector clipped_subdistribution(const Distribution& p,
                                            const Distribution& q,
                                            long long n_budget) {
  if (p.size() != q.size())
    throw AlphabetMismatchError("clipped_subdistribution");
  std::vector<double> v(p.size());
  for (int i = 0; i < p.size(); ++i)
    v[i] = std::min(p[i], static_cast<double>(n_budget) * q[i]);
  return NonnegVector(std::move(v));
}

struct RejectionOutput {
  Distribution s_dist;
  double abort_prob;  // p = (1 - sum(Pbar)/N)^(N~)
};

// Exact law of the accept/reject procedure: the abort branch re-emits a
// fresh proposal sample.
inline RejectionOutput rejection_output_distribution(
    const RejectionPlan& plan) {
  const NonnegVector pbar =
      clipped_subdistribution(plan.target, plan.proposal, plan.n_budget);
  const double mass = pbar.total_mass();
  const double ratio = mass / static_cast<double>(plan.n_budget);
  double abort;
  if (ratio >= 1.0) {
    abort = 0.0;
  } else {
    abort = std::exp2(static_cast<double>(plan.iteration_cap) *
                      std::log2(1.0 - ratio));
  }
  std::vector<double> s(plan.target.size());
  for (int i = 0; i < plan.target.size(); ++i)
    s[i] = (1.0 - abort) * pbar[i] / mass + abort * plan.proposal[i];
  return {Distribution(std::move(s)), abort};
}

// Outcome of one stochastic execution. index = 0 encodes abort, in which
// case no symbol was accepted (the protocol output is then the j = 0
// pre-shared proposal sample).
struct SamplingOutcome {
  long long index = 0;
  std::optional<int> accepted_symbol;
  bool aborted() const { return index == 0; }
};

inline SamplingOutcome run_rejection(const RejectionPlan& plan,
                                     RandomStream& rng) {
  const NonnegVector pbar =
      clipped_subdistribution(plan.target, plan.proposal, plan.n_budget);
  const double n = static_cast<double>(plan.n_budget);
  for (long long j = 1; j <= plan.iteration_cap; ++j) {
    const int x = rng.next_index(plan.proposal.probs());
    const double accept = pbar[x] / (n * plan.proposal[x]);
    if (rng.next_bernoulli(accept)) return {j, x};
  }
  return {0, std::nullopt};
}

// ---------------------------------------------------------------------------
// Scheduled rejection sampling (standard and variant recursions).

enum class ScheduleMode { kStandard, kVariant };

// The per-iteration quantities (a_j, p_j, s_j, beta_j) of the scheduled
// procedures. Index 0 holds the initial state (a is defined for j >= 1).
struct RejectionSchedule {
  ScheduleMode mode = ScheduleMode::kStandard;
  double lambda = 1.0;  // total target mass (1 in standard mode)
  std::vector<std::vector<double>> accept_probs;  // a_j(x), j = 1..N
  std::vector<std::vector<double>> residuals;     // p_j(x), j = 0..N
  std::vector<double> residual_mass;              // s_j,    j = 0..N
  std::vector<double> beta;                       // beta_j, j = 0..N

  long long n_budget() const {
    return static_cast<long long>(accept_probs.size());
  }
};

// Runs the stated recursions exactly.
//   Standard: a_j = min{1, p_{j-1}/(s_{j-1} Q)},  p_j = p_{j-1} - s_{j-1} Q a_j
//   Variant:  denominators use (1 - lambda + s_{j-1}) instead of s_{j-1}
// Standard mode requires a full distribution; variant a strict
// sub-distribution (mass in (0,1)).
inline RejectionSchedule build_schedule(const NonnegVector& target,
                                        const Distribution& proposal,
                                        long long n_budget,
                                        ScheduleMode mode) {
  if (target.size() != proposal.size())
    throw AlphabetMismatchError("build_schedule");
  if (n_budget < 1) throw Error("build_schedule: n_budget must be >= 1");
  detail::require_support_subset(target.values(), proposal.probs(),
                                 "build_schedule");
  const double lambda = target.total_mass();
  if (mode == ScheduleMode::kStandard) {
    if (std::abs(lambda - 1.0) > 1e-9)
      throw Error("build_schedule: standard mode requires a distribution");
  } else {
    if (!(lambda > 0.0 && lambda < 1.0))
      throw Error("build_schedule: variant mode requires mass in (0,1)");
  }

  const int m = target.size();
  RejectionSchedule sched;
  sched.mode = mode;
  sched.lambda = lambda;
  sched.residuals.push_back(
      std::vector<double>(target.values().begin(), target.values().end()));
  sched.residual_mass.push_back(lambda);
  sched.beta.push_back(0.0);

  double beta = 0.0;
  for (long long j = 1; j <= n_budget; ++j) {
    const std::vector<double>& prev = sched.residuals.back();
    const double s_prev = sched.residual_mass.back();
    const double denom_scale =
        mode == ScheduleMode::kStandard ? s_prev : (1.0 - lambda + s_prev);
    std::vector<double> a(m, 0.0), p(m, 0.0);
    double s = 0.0;
    for (int x = 0; x < m; ++x) {
      const double dq = denom_scale * proposal[x];
      if (prev[x] > 0.0 && dq > 0.0)
        a[x] = std::min(1.0, prev[x] / dq);
      p[x] = std::max(prev[x] - dq * a[x], 0.0);
      s += p[x];
    }
    beta += mode == ScheduleMode::kStandard ? s_prev : (1.0 - lambda + s_prev);
    sched.accept_probs.push_back(std::move(a));
    sched.residuals.push_back(std::move(p));
    sched.residual_mass.push_back(s);
    sched.beta.push_back(beta);
  }
  return sched;
}

// ---------------------------------------------------------------------------
// Two-phase procedure: one variant pass over the clipped-off remainder,
// then up to K standard passes.

struct TwoPhasePlan {
  Distribution target;
  Distribution proposal;
  long long n_budget;  // N (iterations per pass)
  long long repeats;   // K (standard passes)

  TwoPhasePlan(Distribution target_, Distribution proposal_, long long n,
               long long k)
      : target(std::move(target_)),
        proposal(std::move(proposal_)),
        n_budget(n),
        repeats(k) {
    if (target.size() != proposal.size())
      throw AlphabetMismatchError("TwoPhasePlan");
    if (n_budget < 1 || repeats < 1)
      throw Error("TwoPhasePlan: budgets must be >= 1");
    detail::require_support_subset(target.probs(), proposal.probs(),
                                   "TwoPhasePlan");
  }

  // Index alphabet {0, ..., (K+1)N} needs ceil(log2((K+1)N + 1)) bits.
  double communication_bits() const {
    return std::ceil(std::log2(
        static_cast<double>((repeats + 1) * n_budget + 1)));
  }
};

namespace detail {

struct TwoPhaseParts {
  RejectionSchedule standard;              // (P, Q, N)
  std::optional<RejectionSchedule> variant;  // (P - P0, Q, N); absent if s_N=0
  std::vector<double> p0;                  // min{P, beta_N Q}
  double s_n;                              // standard abort probability
};

inline TwoPhaseParts two_phase_parts(const TwoPhasePlan& plan) {
  TwoPhaseParts parts{build_schedule(plan.target, plan.proposal,
                                     plan.n_budget, ScheduleMode::kStandard),
                      std::nullopt,
                      {},
                      0.0};
  const double beta_n = parts.standard.beta.back();
  parts.s_n = parts.standard.residual_mass.back();
  const int m = plan.target.size();
  parts.p0.resize(m);
  std::vector<double> phat(m);
  for (int x = 0; x < m; ++x) {
    parts.p0[x] = std::min(plan.target[x], beta_n * plan.proposal[x]);
    phat[x] = std::max(plan.target[x] - parts.p0[x], 0.0);
  }
  if (parts.s_n > 0.0)
    parts.variant = build_schedule(NonnegVector(phat), plan.proposal,
                                   plan.n_budget, ScheduleMode::kVariant);
  return parts;
}

}  // namespace detail

struct TwoPhaseOutput {
  Distribution s_dist;
  bool lower_bound_ok;  // S(x) >= (1 - s_N^K) min{P(x), N Q(x)} entrywise
  double s_n;
};

// Exact output law: the variant phase emits min{Phat, betahat_N Q}; on its
// abort the K standard repeats emit geometric multiples of P0, and the
// final abort falls back to one proposal draw.
inline TwoPhaseOutput two_phase_output_distribution(const TwoPhasePlan& plan) {
  const detail::TwoPhaseParts parts = detail::two_phase_parts(plan);
  const int m = plan.target.size();
  const double s_n = parts.s_n;
  const double k = static_cast<double>(plan.repeats);

  // Conditional law of the second phase (entered on variant abort).
  const double s_n_pow_k = std::pow(s_n, k);
  double geom = 0.0;  // 1 + s_N + ... + s_N^{K-1}
  for (long long i = 0; i < plan.repeats; ++i) geom += std::pow(s_n, i);
  std::vector<double> u(m);
  for (int x = 0; x < m; ++x)
    u[x] = geom * parts.p0[x] + s_n_pow_k * plan.proposal[x];

  std::vector<double> s(m);
  double variant_abort = 1.0;
  for (int x = 0; x < m; ++x) s[x] = 0.0;
  if (parts.variant) {
    const auto& v = *parts.variant;
    const double lambda = v.lambda;
    const double betahat_n = v.beta.back();
    variant_abort = 1.0 - lambda + v.residual_mass.back();
    for (int x = 0; x < m; ++x) {
      const double phat = v.residuals.front()[x];
      s[x] = std::min(phat, betahat_n * plan.proposal[x]);
    }
  }
  for (int x = 0; x < m; ++x) s[x] += variant_abort * u[x];

  bool ok = true;
  for (int x = 0; x < m; ++x) {
    const double lb =
        (1.0 - s_n_pow_k) *
        std::min(plan.target[x],
                 static_cast<double>(plan.n_budget) * plan.proposal[x]);
    if (s[x] < lb - 1e-12) ok = false;
  }
  return {Distribution(std::move(s)), ok, s_n};
}

// Stochastic execution of the two-phase procedure. Index ranges over
// {0, ..., (K+1)N}: phase-one iteration j keeps index j, pass k iteration j
// maps to k N + j, abort is 0.
inline SamplingOutcome run_two_phase(const TwoPhasePlan& plan,
                                     RandomStream& rng) {
  const detail::TwoPhaseParts parts = detail::two_phase_parts(plan);
  if (parts.variant) {
    const auto& v = *parts.variant;
    for (long long j = 1; j <= plan.n_budget; ++j) {
      const int x = rng.next_index(plan.proposal.probs());
      if (rng.next_bernoulli(v.accept_probs[j - 1][x])) return {j, x};
    }
  } else {
    // Empty remainder: phase one draws its samples but never accepts.
    for (long long j = 1; j <= plan.n_budget; ++j) {
      (void)rng.next_index(plan.proposal.probs());
      (void)rng.next_double();
    }
  }
  for (long long pass = 1; pass <= plan.repeats; ++pass) {
    for (long long j = 1; j <= plan.n_budget; ++j) {
      const int x = rng.next_index(plan.proposal.probs());
      if (rng.next_bernoulli(parts.standard.accept_probs[j - 1][x]))
        return {pass * plan.n_budget + j, x};
    }
  }
  return {0, std::nullopt};
}

}  // namespace chansim
