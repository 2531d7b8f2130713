#include "acheck/trace.hpp"

#include <array>
#include <ostream>
#include <utility>

namespace acheck {

namespace {

constexpr std::array<std::pair<Rule, std::string_view>, 28> kRuleNames{{
    {Rule::TrueL, "trueL"},     {Rule::FalseL, "falseL"},     {Rule::AndL, "andL"},
    {Rule::OrL, "orL"},         {Rule::ExL, "existsL"},       {Rule::EqL, "eqL"},
    {Rule::Freeze, "freeze"},   {Rule::StoreL, "storeL"},     {Rule::UnfoldL, "unfoldL"},
    {Rule::ObviousInd, "obviousInd"}, {Rule::Ind, "ind"},     {Rule::ImpR, "impR"},
    {Rule::AllR, "forallR"},    {Rule::StoreR, "storeR"},     {Rule::Decide, "decide"},
    {Rule::DecideR, "decideR"}, {Rule::AllL, "forallL"},      {Rule::ImpL, "impL"},
    {Rule::ReleaseL, "releaseL"}, {Rule::TrueR, "trueR"},     {Rule::AndR, "andR"},
    {Rule::OrR1, "orR1"},       {Rule::OrR2, "orR2"},         {Rule::ExR, "existsR"},
    {Rule::EqR, "eqR"},         {Rule::Init, "init"},         {Rule::UnfoldR, "unfoldR"},
    {Rule::ReleaseR, "releaseR"},
}};

void write_node(std::ostream& out, const TraceNode& n, const Printer& p) {
  out << rule_name(n.rule) << '\t' << (n.principal ? p.formula(n.principal) : "-") << '\t';
  if (n.terms.empty()) out << '-';
  for (std::size_t i = 0; i < n.terms.size(); ++i) out << (i ? " | " : "") << p.term(n.terms[i]);
  out << '\t' << (n.index ? n.index->to_string() : "-") << '\t' << n.children.size() << '\t'
      << (n.invariant ? p.abstraction(*n.invariant) : "-") << '\n';
  for (const auto& c : n.children) write_node(out, c, p);
}

}  // namespace

std::string_view rule_name(Rule r) {
  for (const auto& [rule, name] : kRuleNames)
    if (rule == r) return name;
  return "?";
}

std::optional<Rule> rule_from_name(std::string_view name) {
  for (const auto& [rule, n] : kRuleNames)
    if (n == name) return rule;
  return std::nullopt;
}

TraceStats trace_stats(const TraceNode& root) {
  TraceStats s;
  for_each_node(root, [&](const TraceNode& n) {
    ++s.nodes;
    switch (n.rule) {
      case Rule::Decide: ++s.decides; break;
      case Rule::DecideR: ++s.decides_right; break;
      case Rule::UnfoldL: ++s.unfold_left; break;
      case Rule::UnfoldR: ++s.unfold_right; break;
      case Rule::Ind:
      case Rule::ObviousInd: ++s.inductions; break;
      default: break;
    }
  });
  return s;
}

void write_trace(std::ostream& out, const TraceNode& root, std::string_view theorem) {
  out << "# acheck-trace v1\n# theorem " << theorem << '\n';
  Printer p(/*canonical=*/true);
  write_node(out, root, p);
}

}  // namespace acheck
