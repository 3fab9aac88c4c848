#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace oslab {

enum class PolicyKind { Lcq, LcqD, LcqDn };

// How a sampling policy picks its d candidates at a scheduling instant.
//
// GeneratorFaithful gates on one "does any connected queue exist" draw and
// then inspects d i.i.d. uniform queues, which reproduces the jump rates
// n*alpha_n*((1-u_{k+1})^d - (1-u_k)^d) exactly.  Physical draws the
// connected subset first and samples the d candidates from it, which is the
// operational description of the scheduler; the two laws coincide only as
// n grows.
enum class SelectionMode { GeneratorFaithful, Physical };

// Growth rule for LCQ(d_n): d_n = clamp(ceil(n^exponent), 1, n).
// exponent must lie in (0,1) so that d_n -> infinity and d_n/n -> 0.
struct DnRule {
  double exponent = 0.5;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::Lcq;
  std::optional<int> d;                          // present iff kind == LcqD
  std::optional<DnRule> dn_rule;                 // present iff kind == LcqDn
  std::optional<SelectionMode> selection_mode;   // present iff kind != Lcq

  static PolicySpec lcq();
  static PolicySpec lcqd(int d, SelectionMode mode = SelectionMode::GeneratorFaithful);
  static PolicySpec lcqdn(DnRule rule, SelectionMode mode = SelectionMode::GeneratorFaithful);
};

// n homogeneous queues, per-queue Poisson arrivals at rate lambda, packet
// transmission rate n, channels connected independently with probability q.
struct SystemParams {
  int64_t n = 1;
  double lambda = 0.5;
  double q = 0.5;
  PolicySpec policy;
};

// Returns p unchanged if all invariants hold, throws std::invalid_argument
// otherwise (lambda outside (0,1), q outside (0,1], d < 1, malformed policy
// field combinations, dn exponent outside (0,1)).
const SystemParams& validate_params(const SystemParams& p);

int64_t resolve_dn(const DnRule& rule, int64_t n);

// The candidate-set size the sampling policies use at each scheduling
// instant: d for LCQ(d), resolve_dn(rule, n) for LCQ(d_n).  Throws for LCQ.
int64_t effective_d(const SystemParams& p);

std::string to_string(PolicyKind kind);
std::string to_string(SelectionMode mode);
PolicyKind policy_kind_from_string(const std::string& s);
SelectionMode selection_mode_from_string(const std::string& s);

}  // namespace oslab
