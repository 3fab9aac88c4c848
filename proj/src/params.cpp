#include "oslab/params.hpp"

#include <cmath>
#include <stdexcept>

namespace oslab {

PolicySpec PolicySpec::lcq() {
  PolicySpec s;
  s.kind = PolicyKind::Lcq;
  return s;
}

PolicySpec PolicySpec::lcqd(int d, SelectionMode mode) {
  PolicySpec s;
  s.kind = PolicyKind::LcqD;
  s.d = d;
  s.selection_mode = mode;
  return s;
}

PolicySpec PolicySpec::lcqdn(DnRule rule, SelectionMode mode) {
  PolicySpec s;
  s.kind = PolicyKind::LcqDn;
  s.dn_rule = rule;
  s.selection_mode = mode;
  return s;
}

const SystemParams& validate_params(const SystemParams& p) {
  if (p.n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(p.lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(p.lambda < 1.0)) throw std::invalid_argument("lambda must be < 1");
  if (!(p.q > 0.0)) throw std::invalid_argument("q must be > 0");
  if (!(p.q <= 1.0)) throw std::invalid_argument("q must be <= 1");

  const PolicySpec& pol = p.policy;
  switch (pol.kind) {
    case PolicyKind::Lcq:
      if (pol.d || pol.dn_rule || pol.selection_mode)
        throw std::invalid_argument("LCQ takes no d, dn rule, or selection mode");
      break;
    case PolicyKind::LcqD:
      if (!pol.d) throw std::invalid_argument("LCQ(d) requires d");
      if (*pol.d < 1) throw std::invalid_argument("d >= 1 required");
      if (pol.dn_rule) throw std::invalid_argument("LCQ(d) takes no dn rule");
      if (!pol.selection_mode) throw std::invalid_argument("LCQ(d) requires a selection mode");
      break;
    case PolicyKind::LcqDn:
      if (!pol.dn_rule) throw std::invalid_argument("LCQ(d_n) requires a dn rule");
      if (pol.d) throw std::invalid_argument("LCQ(d_n) takes no fixed d");
      if (!pol.selection_mode) throw std::invalid_argument("LCQ(d_n) requires a selection mode");
      if (!(pol.dn_rule->exponent > 0.0 && pol.dn_rule->exponent < 1.0))
        throw std::invalid_argument("dn exponent must be in (0,1)");
      break;
  }
  return p;
}

int64_t resolve_dn(const DnRule& rule, int64_t n) {
  double raw = std::ceil(std::pow(static_cast<double>(n), rule.exponent));
  auto d = static_cast<int64_t>(raw);
  if (d < 1) d = 1;
  if (d > n) d = n;
  return d;
}

int64_t effective_d(const SystemParams& p) {
  switch (p.policy.kind) {
    case PolicyKind::LcqD:
      return *p.policy.d;
    case PolicyKind::LcqDn:
      return resolve_dn(*p.policy.dn_rule, p.n);
    case PolicyKind::Lcq:
      break;
  }
  throw std::invalid_argument("LCQ has no candidate-set size d");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Lcq: return "lcq";
    case PolicyKind::LcqD: return "lcqd";
    case PolicyKind::LcqDn: return "lcqdn";
  }
  return "?";
}

std::string to_string(SelectionMode mode) {
  return mode == SelectionMode::GeneratorFaithful ? "faithful" : "physical";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "lcq") return PolicyKind::Lcq;
  if (s == "lcqd") return PolicyKind::LcqD;
  if (s == "lcqdn") return PolicyKind::LcqDn;
  throw std::invalid_argument("unknown policy: " + s);
}

SelectionMode selection_mode_from_string(const std::string& s) {
  if (s == "faithful") return SelectionMode::GeneratorFaithful;
  if (s == "physical") return SelectionMode::Physical;
  throw std::invalid_argument("unknown selection mode: " + s);
}

}  // namespace oslab
