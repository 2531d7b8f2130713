#include "acheck/fpc.hpp"

#include <stdexcept>

namespace acheck {

std::string Index::to_string() const {
  return kind == Kind::Lemma ? "L:" + lemma.name() : "H:" + std::to_string(serial);
}

Cert FpcDefinition::parse_certificate(std::string_view) const {
  throw std::invalid_argument(std::string(name()) + " has no concrete certificate syntax");
}

std::optional<std::string> FpcDefinition::validate(const Cert&, std::span<const Sym>) const { return std::nullopt; }

std::vector<Cert> FpcDefinition::schedule(const Cert& cert) const { return {cert}; }

// Clerks not interesting to a given FPC pass the certificate through.
std::vector<std::pair<Cert, Cert>> FpcDefinition::or_left_clerk(const Cert& c) const { return {{c, c}}; }
std::vector<Cert> FpcDefinition::exists_left_clerk(const Cert& c) const { return {c}; }
std::vector<Cert> FpcDefinition::and_left_clerk(const Cert& c) const { return {c}; }
std::vector<Cert> FpcDefinition::imp_right_clerk(const Cert& c) const { return {c}; }
std::vector<Cert> FpcDefinition::all_right_clerk(const Cert& c) const { return {c}; }
std::vector<Cert> FpcDefinition::eq_left_clerk(const Cert& c) const { return {c}; }
std::vector<Cert> FpcDefinition::true_left_clerk(const Cert& c) const { return {c}; }
std::vector<Cert> FpcDefinition::false_left_clerk(const Cert& c) const { return {c}; }
std::vector<std::pair<Cert, Cert>> FpcDefinition::imp_left_expert(const Cert& c) const { return {{c, c}}; }
std::vector<Cert> FpcDefinition::true_expert(const Cert& c) const { return {c}; }

}  // namespace acheck
