#include "acheck/syntax.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <shared_mutex>

namespace acheck {

// --- Sym --------------------------------------------------------------------

namespace {

struct InternTable {
  std::shared_mutex mutex;
  std::vector<std::unique_ptr<std::string>> names{};
  std::unordered_map<std::string, uint32_t> ids;

  InternTable() { names.push_back(std::make_unique<std::string>("<invalid>")); }
};

InternTable& intern_table() {
  static InternTable table;
  return table;
}

std::atomic<uint64_t> next_var_id{1};

}  // namespace

Sym Sym::intern(std::string_view name) {
  auto& table = intern_table();
  std::string key(name);
  {
    std::shared_lock lock(table.mutex);
    if (auto it = table.ids.find(key); it != table.ids.end()) return Sym(it->second);
  }
  std::unique_lock lock(table.mutex);
  if (auto it = table.ids.find(key); it != table.ids.end()) return Sym(it->second);
  auto id = static_cast<uint32_t>(table.names.size());
  table.names.push_back(std::make_unique<std::string>(key));
  table.ids.emplace(std::move(key), id);
  return Sym(id);
}

const std::string& Sym::name() const {
  auto& table = intern_table();
  std::shared_lock lock(table.mutex);
  return *table.names.at(id_);
}

// --- Term -------------------------------------------------------------------

namespace {
constexpr uint8_t kHasBVar = 1;
constexpr uint8_t kHasEVar = 2;
constexpr uint8_t kHasMVar = 4;
}  // namespace

struct Term::Node {
  Kind kind;
  uint8_t flags = 0;
  uint32_t small = 0;  // BVar index or variable level
  uint64_t id = 0;
  Sym head;
  std::vector<Term> args;
  std::size_t depth = 1;
};

Term Term::bvar(uint32_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::BVar;
  n->flags = kHasBVar;
  n->small = index;
  return Term(std::move(n));
}

Term Term::evar(uint64_t id, uint32_t level) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::EVar;
  n->flags = kHasEVar;
  n->small = level;
  n->id = id;
  return Term(std::move(n));
}

Term Term::mvar(uint64_t id, uint32_t level) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::MVar;
  n->flags = kHasMVar;
  n->small = level;
  n->id = id;
  return Term(std::move(n));
}

Term Term::app(Sym head, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::App;
  n->head = head;
  std::size_t depth = 0;
  for (const auto& a : args) {
    if (!a) throw StructuralError("null term argument");
    n->flags |= a.node_->flags;
    depth = std::max(depth, a.node_->depth);
  }
  n->depth = depth + 1;
  n->args = std::move(args);
  return Term(std::move(n));
}

Term::Kind Term::kind() const { return node_->kind; }

uint32_t Term::index() const {
  if (node_->kind != Kind::BVar) throw StructuralError("index() on non-bound variable");
  return node_->small;
}

uint64_t Term::var_id() const {
  if (node_->kind != Kind::EVar && node_->kind != Kind::MVar)
    throw StructuralError("var_id() on non-variable");
  return node_->id;
}

uint32_t Term::level() const {
  if (node_->kind != Kind::EVar && node_->kind != Kind::MVar)
    throw StructuralError("level() on non-variable");
  return node_->small;
}

Sym Term::head() const {
  if (node_->kind != Kind::App) throw StructuralError("head() on variable");
  return node_->head;
}

std::span<const Term> Term::args() const {
  if (node_->kind != Kind::App) return {};
  return node_->args;
}

bool Term::has_bvar() const { return node_->flags & kHasBVar; }
bool Term::has_evar() const { return node_->flags & kHasEVar; }
bool Term::has_mvar() const { return node_->flags & kHasMVar; }
std::size_t Term::depth() const { return node_->depth; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Term::Kind::BVar: return x.small == y.small;
    case Term::Kind::EVar:
    case Term::Kind::MVar: return x.id == y.id;
    case Term::Kind::App:
      return x.head == y.head && x.args.size() == y.args.size() &&
             std::equal(x.args.begin(), x.args.end(), y.args.begin());
  }
  return false;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (!a.node_) return std::strong_ordering::less;
  if (!b.node_) return std::strong_ordering::greater;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return x.kind <=> y.kind;
  switch (x.kind) {
    case Term::Kind::BVar: return x.small <=> y.small;
    case Term::Kind::EVar:
    case Term::Kind::MVar: return x.id <=> y.id;
    case Term::Kind::App: {
      if (auto c = x.head <=> y.head; c != 0) return c;
      if (auto c = x.args.size() <=> y.args.size(); c != 0) return c;
      for (std::size_t i = 0; i < x.args.size(); ++i)
        if (auto c = x.args[i] <=> y.args[i]; c != 0) return c;
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

// --- Formula ----------------------------------------------------------------

struct Formula::Node {
  Kind kind;
  uint8_t flags = 0;
  Term l, r;        // Eq
  Formula a, b;     // And / Or / Imp use a,b; All / Ex use a
  Sym def;          // Mu
  std::vector<Term> args;
};

Formula Formula::eq(Term l, Term r) {
  if (!l || !r) throw StructuralError("null term in equation");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Eq;
  n->flags = static_cast<uint8_t>((l.has_bvar() ? kHasBVar : 0) | (l.has_evar() ? kHasEVar : 0) |
                                  (l.has_mvar() ? kHasMVar : 0) | (r.has_bvar() ? kHasBVar : 0) |
                                  (r.has_evar() ? kHasEVar : 0) | (r.has_mvar() ? kHasMVar : 0));
  n->l = std::move(l);
  n->r = std::move(r);
  return Formula(std::move(n));
}

static uint8_t formula_flags(const Formula& f) {
  return static_cast<uint8_t>((f.has_bvar() ? kHasBVar : 0) | (f.has_evar() ? kHasEVar : 0) |
                              (f.has_mvar() ? kHasMVar : 0));
}

Formula Formula::conj(Formula a, Formula b) {
  if (!a || !b) throw StructuralError("null conjunct");
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->flags = formula_flags(a) | formula_flags(b);
  n->a = std::move(a);
  n->b = std::move(b);
  return Formula(std::move(n));
}

Formula Formula::disj(Formula a, Formula b) {
  if (!a || !b) throw StructuralError("null disjunct");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->flags = formula_flags(a) | formula_flags(b);
  n->a = std::move(a);
  n->b = std::move(b);
  return Formula(std::move(n));
}

Formula Formula::imp(Formula a, Formula b) {
  if (!a || !b) throw StructuralError("null implication operand");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Imp;
  n->flags = formula_flags(a) | formula_flags(b);
  n->a = std::move(a);
  n->b = std::move(b);
  return Formula(std::move(n));
}

Formula Formula::all(Formula body) {
  if (!body) throw StructuralError("null quantifier body");
  auto n = std::make_shared<Node>();
  n->kind = Kind::All;
  n->flags = formula_flags(body);
  n->a = std::move(body);
  return Formula(std::move(n));
}

Formula Formula::ex(Formula body) {
  if (!body) throw StructuralError("null quantifier body");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Ex;
  n->flags = formula_flags(body);
  n->a = std::move(body);
  return Formula(std::move(n));
}

Formula Formula::mu(Sym def, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mu;
  n->def = def;
  for (const auto& t : args) {
    if (!t) throw StructuralError("null atom argument");
    n->flags |= static_cast<uint8_t>((t.has_bvar() ? kHasBVar : 0) | (t.has_evar() ? kHasEVar : 0) |
                                     (t.has_mvar() ? kHasMVar : 0));
  }
  n->args = std::move(args);
  return Formula(std::move(n));
}

Formula Formula::tt() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::True;
    return Formula(std::move(n));
  }();
  return f;
}

Formula Formula::ff() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::False;
    return Formula(std::move(n));
  }();
  return f;
}

Formula::Kind Formula::kind() const { return node_->kind; }

const Term& Formula::lhs() const {
  if (node_->kind != Kind::Eq) throw StructuralError("lhs() on non-equation");
  return node_->l;
}
const Term& Formula::rhs() const {
  if (node_->kind != Kind::Eq) throw StructuralError("rhs() on non-equation");
  return node_->r;
}
const Formula& Formula::left() const {
  auto k = node_->kind;
  if (k != Kind::And && k != Kind::Or && k != Kind::Imp) throw StructuralError("left() on non-binary formula");
  return node_->a;
}
const Formula& Formula::right() const {
  auto k = node_->kind;
  if (k != Kind::And && k != Kind::Or && k != Kind::Imp) throw StructuralError("right() on non-binary formula");
  return node_->b;
}
const Formula& Formula::body() const {
  if (node_->kind != Kind::All && node_->kind != Kind::Ex) throw StructuralError("body() on non-quantifier");
  return node_->a;
}
Sym Formula::def() const {
  if (node_->kind != Kind::Mu) throw StructuralError("def() on non-atom");
  return node_->def;
}
std::span<const Term> Formula::args() const {
  if (node_->kind != Kind::Mu) throw StructuralError("args() on non-atom");
  return node_->args;
}

bool Formula::has_bvar() const { return node_->flags & kHasBVar; }
bool Formula::has_evar() const { return node_->flags & kHasEVar; }
bool Formula::has_mvar() const { return node_->flags & kHasMVar; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Formula::Kind::Eq: return x.l == y.l && x.r == y.r;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp: return x.a == y.a && x.b == y.b;
    case Formula::Kind::All:
    case Formula::Kind::Ex: return x.a == y.a;
    case Formula::Kind::Mu:
      return x.def == y.def && x.args.size() == y.args.size() &&
             std::equal(x.args.begin(), x.args.end(), y.args.begin());
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
  }
  return false;
}

// --- tables -----------------------------------------------------------------

void DefTable::add(Definition def) {
  if (by_name_.count(def.name.id())) throw StructuralError("duplicate definition " + def.name.name());
  by_name_.emplace(def.name.id(), defs_.size());
  defs_.push_back(std::move(def));
}

const Definition* DefTable::find(Sym name) const {
  auto it = by_name_.find(name.id());
  return it == by_name_.end() ? nullptr : &defs_[it->second];
}

const Definition& DefTable::at(Sym name) const {
  if (const auto* d = find(name)) return *d;
  throw StructuralError("unknown definition " + name.name());
}

void Signature::add_sort(Sym sort) {
  if (!has_sort(sort)) sorts_.push_back(sort);
}

void Signature::add_constructor(ConstructorSig c) {
  if (constructor(c.name)) throw StructuralError("duplicate constructor " + c.name.name());
  ctors_.push_back(std::move(c));
}

bool Signature::has_sort(Sym sort) const {
  return std::find(sorts_.begin(), sorts_.end(), sort) != sorts_.end();
}

const ConstructorSig* Signature::constructor(Sym name) const {
  for (const auto& c : ctors_)
    if (c.name == name) return &c;
  return nullptr;
}

// --- substitution -----------------------------------------------------------

Term shift(const Term& t, uint32_t amount) {
  if (amount == 0 || !t.has_bvar()) return t;
  if (t.is_bvar()) return Term::bvar(t.index() + amount);
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(shift(a, amount));
  return Term::app(t.head(), std::move(args));
}

Formula map_terms(const Formula& f, const std::function<Term(const Term&, uint32_t)>& fn) {
  std::function<Formula(const Formula&, uint32_t)> go = [&](const Formula& g, uint32_t depth) -> Formula {
    switch (g.kind()) {
      case Formula::Kind::Eq: {
        Term l = fn(g.lhs(), depth), r = fn(g.rhs(), depth);
        if (l.same_node(g.lhs()) && r.same_node(g.rhs())) return g;
        return Formula::eq(std::move(l), std::move(r));
      }
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Imp: {
        Formula a = go(g.left(), depth), b = go(g.right(), depth);
        if (a.same_node(g.left()) && b.same_node(g.right())) return g;
        if (g.kind() == Formula::Kind::And) return Formula::conj(std::move(a), std::move(b));
        if (g.kind() == Formula::Kind::Or) return Formula::disj(std::move(a), std::move(b));
        return Formula::imp(std::move(a), std::move(b));
      }
      case Formula::Kind::All:
      case Formula::Kind::Ex: {
        Formula b = go(g.body(), depth + 1);
        if (b.same_node(g.body())) return g;
        return g.kind() == Formula::Kind::All ? Formula::all(std::move(b)) : Formula::ex(std::move(b));
      }
      case Formula::Kind::Mu: {
        bool changed = false;
        std::vector<Term> args;
        args.reserve(g.args().size());
        for (const auto& t : g.args()) {
          args.push_back(fn(t, depth));
          changed |= !args.back().same_node(t);
        }
        return changed ? Formula::mu(g.def(), std::move(args)) : g;
      }
      case Formula::Kind::True:
      case Formula::Kind::False: return g;
    }
    return g;
  };
  return go(f, 0);
}

namespace {

Term instantiate_term(const Term& t, uint32_t depth, std::span<const Term> args) {
  if (!t.has_bvar()) return t;
  const auto n = static_cast<uint32_t>(args.size());
  if (t.is_bvar()) {
    uint32_t k = t.index();
    if (k < depth) return t;
    if (k - depth < n) return shift(args[n - 1 - (k - depth)], depth);
    return Term::bvar(k - n);
  }
  std::vector<Term> out;
  out.reserve(t.args().size());
  bool changed = false;
  for (const auto& a : t.args()) {
    out.push_back(instantiate_term(a, depth, args));
    changed |= !out.back().same_node(a);
  }
  return changed ? Term::app(t.head(), std::move(out)) : t;
}

}  // namespace

Formula instantiate(const Formula& body, std::span<const Term> args) {
  for (const auto& a : args)
    if (!a) throw StructuralError("null instantiation term");
  if (args.empty() || !body.has_bvar()) return body;
  return map_terms(body, [&](const Term& t, uint32_t depth) { return instantiate_term(t, depth, args); });
}

Formula Abstraction::apply(std::span<const Term> args) const {
  if (args.size() != arity)
    throw StructuralError("abstraction of arity " + std::to_string(arity) + " applied to " +
                          std::to_string(args.size()) + " arguments");
  return instantiate(body, args);
}

Formula open_binder(const Formula& f, const Term& t) {
  if (!f || (f.kind() != Formula::Kind::All && f.kind() != Formula::Kind::Ex))
    throw StructuralError("open_binder on a formula without an outer quantifier");
  return instantiate(f.body(), std::span<const Term>(&t, 1));
}

Formula abstract_evar(const Formula& f, uint64_t evar_id) {
  return map_terms(f, [&](const Term& t, uint32_t depth) {
    std::function<Term(const Term&)> go = [&](const Term& u) -> Term {
      switch (u.kind()) {
        case Term::Kind::BVar: return u.index() >= depth ? Term::bvar(u.index() + 1) : u;
        case Term::Kind::EVar: return u.var_id() == evar_id ? Term::bvar(depth) : u;
        case Term::Kind::MVar: return u;
        case Term::Kind::App: {
          if (!u.has_bvar() && !u.has_evar()) return u;
          std::vector<Term> args;
          bool changed = false;
          for (const auto& a : u.args()) {
            args.push_back(go(a));
            changed |= !args.back().same_node(a);
          }
          return changed ? Term::app(u.head(), std::move(args)) : u;
        }
      }
      return u;
    };
    return go(t);
  });
}

namespace {

Formula replace_mu(const Formula& f, Sym def, const std::function<Formula(std::span<const Term>)>& self) {
  switch (f.kind()) {
    case Formula::Kind::Mu: return f.def() == def ? self(f.args()) : f;
    case Formula::Kind::And: return Formula::conj(replace_mu(f.left(), def, self), replace_mu(f.right(), def, self));
    case Formula::Kind::Or: return Formula::disj(replace_mu(f.left(), def, self), replace_mu(f.right(), def, self));
    case Formula::Kind::Imp: return Formula::imp(replace_mu(f.left(), def, self), replace_mu(f.right(), def, self));
    case Formula::Kind::All: return Formula::all(replace_mu(f.body(), def, self));
    case Formula::Kind::Ex: return Formula::ex(replace_mu(f.body(), def, self));
    default: return f;
  }
}

}  // namespace

Formula unfold_mu(const Definition& d, std::span<const Term> args) {
  if (args.size() != d.arity())
    throw StructuralError("unfolding " + d.name.name() + " of arity " + std::to_string(d.arity()) + " with " +
                          std::to_string(args.size()) + " arguments");
  return d.body.apply(args);
}

Formula unfold_with(const Definition& d, std::span<const Term> args,
                    const std::function<Formula(std::span<const Term>)>& self) {
  return replace_mu(unfold_mu(d, args), d.name, self);
}

Term replace_evars(const Term& t, const std::unordered_map<uint64_t, Term>& sub) {
  if (!t.has_evar() || sub.empty()) return t;
  if (t.is_evar()) {
    auto it = sub.find(t.var_id());
    return it == sub.end() ? t : it->second;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(replace_evars(a, sub));
    changed |= !args.back().same_node(a);
  }
  return changed ? Term::app(t.head(), std::move(args)) : t;
}

Formula replace_evars(const Formula& f, const std::unordered_map<uint64_t, Term>& sub) {
  if (!f.has_evar() || sub.empty()) return f;
  for (const auto& [id, t] : sub)
    if (t.has_bvar()) throw StructuralError("eigenvariable replacement must not mention bound variables");
  return map_terms(f, [&](const Term& t, uint32_t) { return replace_evars(t, sub); });
}

void collect_evars(const Term& t, std::vector<Term>& out) {
  if (!t.has_evar()) return;
  if (t.is_evar()) {
    for (const auto& e : out)
      if (e.var_id() == t.var_id()) return;
    out.push_back(t);
    return;
  }
  for (const auto& a : t.args()) collect_evars(a, out);
}

void collect_evars(const Formula& f, std::vector<Term>& out) {
  if (!f.has_evar()) return;
  map_terms(f, [&](const Term& t, uint32_t) {
    collect_evars(t, out);
    return t;
  });
}

bool occurs_evar(const Term& t, uint64_t evar_id) {
  if (!t.has_evar()) return false;
  if (t.is_evar()) return t.var_id() == evar_id;
  for (const auto& a : t.args())
    if (occurs_evar(a, evar_id)) return true;
  return false;
}

bool occurs_evar(const Formula& f, uint64_t evar_id) {
  bool found = false;
  if (!f.has_evar()) return false;
  map_terms(f, [&](const Term& t, uint32_t) {
    found = found || occurs_evar(t, evar_id);
    return t;
  });
  return found;
}

bool has_loose_bvars(const Formula& f) {
  bool loose = false;
  if (!f.has_bvar()) return false;
  map_terms(f, [&](const Term& t, uint32_t depth) {
    std::function<void(const Term&)> go = [&](const Term& u) {
      if (!u.has_bvar()) return;
      if (u.is_bvar()) {
        loose = loose || u.index() >= depth;
        return;
      }
      for (const auto& a : u.args()) go(a);
    };
    go(t);
    return t;
  });
  return loose;
}

Polarity polarity_of(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Imp:
    case Formula::Kind::All: return Polarity::Neg;
    default: return Polarity::Pos;
  }
}

Term fresh_evar(uint32_t level) { return Term::evar(next_var_id.fetch_add(1), level); }
Term fresh_mvar(uint32_t level) { return Term::mvar(next_var_id.fetch_add(1), level); }

// --- printing ---------------------------------------------------------------

std::string Printer::var_name(const Term& t) const {
  const bool ev = t.is_evar();
  if (!canonical_) return (ev ? "E" : "?") + std::to_string(t.var_id());
  auto key = std::make_pair(ev ? 0 : 1, t.var_id());
  auto it = names_.find(key);
  if (it == names_.end()) it = names_.emplace(key, ev ? ++next_e_ : ++next_m_).first;
  return (ev ? "E" : "?") + std::to_string(it->second);
}

void Printer::term_into(std::string& out, const Term& t, uint32_t depth, bool nested) const {
  switch (t.kind()) {
    case Term::Kind::BVar:
      if (t.index() < depth)
        out += "x" + std::to_string(depth - 1 - t.index());
      else
        out += "#" + std::to_string(t.index() - depth);
      return;
    case Term::Kind::EVar:
    case Term::Kind::MVar: out += var_name(t); return;
    case Term::Kind::App:
      if (t.args().empty()) {
        out += t.head().name();
        return;
      }
      if (nested) out += '(';
      out += t.head().name();
      for (const auto& a : t.args()) {
        out += ' ';
        term_into(out, a, depth, true);
      }
      if (nested) out += ')';
      return;
  }
}

void Printer::formula_into(std::string& out, const Formula& f, uint32_t depth) const {
  switch (f.kind()) {
    case Formula::Kind::Eq:
      term_into(out, f.lhs(), depth, false);
      out += " = ";
      term_into(out, f.rhs(), depth, false);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp: {
      const char* op = f.kind() == Formula::Kind::And ? " /\\ " : f.kind() == Formula::Kind::Or ? " \\/ " : " -> ";
      out += '(';
      formula_into(out, f.left(), depth);
      out += op;
      formula_into(out, f.right(), depth);
      out += ')';
      return;
    }
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      out += f.kind() == Formula::Kind::All ? "(forall x" : "(exists x";
      out += std::to_string(depth);
      out += ", ";
      formula_into(out, f.body(), depth + 1);
      out += ')';
      return;
    case Formula::Kind::Mu:
      out += f.def().name();
      for (const auto& a : f.args()) {
        out += ' ';
        term_into(out, a, depth, true);
      }
      return;
    case Formula::Kind::True: out += "true"; return;
    case Formula::Kind::False: out += "false"; return;
  }
}

std::string Printer::term(const Term& t, uint32_t depth) const {
  std::string out;
  term_into(out, t, depth, false);
  return out;
}

std::string Printer::formula(const Formula& f, uint32_t depth) const {
  std::string out;
  formula_into(out, f, depth);
  return out;
}

std::string Printer::abstraction(const Abstraction& a) const {
  std::string out = "(";
  for (uint32_t i = 0; i < a.arity; ++i) out += "\\x" + std::to_string(i) + " ";
  formula_into(out, a.body, a.arity);
  out += ')';
  return out;
}

std::string to_string(const Term& t) { return Printer().term(t); }
std::string to_string(const Formula& f) { return Printer().formula(f); }

}  // namespace acheck
