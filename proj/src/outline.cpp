#include "acheck/outline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>

namespace acheck {

bool operator==(const OutlineNode& a, const OutlineNode& b) {
  if (a.is_split() != b.is_split()) return false;
  if (!a.is_split()) return a.lemmas == b.lemmas;
  return *a.left == *b.left && *a.right == *b.right;
}

bool operator==(const Outline& a, const Outline& b) {
  if (a.kind != b.kind || a.decides != b.decides || a.unfold_left != b.unfold_left ||
      a.unfold_right != b.unfold_right || a.lemmas != b.lemmas)
    return false;
  if (!a.tree || !b.tree) return a.tree == b.tree;
  return *a.tree == *b.tree;
}

// --- concrete syntax -------------------------------------------------------

namespace {

class OutlineParser {
public:
  explicit OutlineParser(std::string_view text) : text_(text) {}

  Outline parse() {
    Outline o;
    open();
    const std::size_t at = (skip(), pos_);
    const std::string head = word();
    if (head == "induction") {
      o.decides = number();
      skip();
      if (peek() == '(') {
        o.kind = Outline::Kind::WithLemmas;
        o.lemmas = lemma_list();
      }
      o.unfold_left = number();
      o.unfold_right = number();
    } else if (head == "tree") {
      o.kind = Outline::Kind::Tree;
      o.decides = number();
      o.unfold_left = number();
      o.unfold_right = number();
      o.tree = node();
    } else {
      throw OutlineSyntaxError(at, "expected 'induction' or 'tree'");
    }
    close();
    skip();
    if (pos_ != text_.size()) throw OutlineSyntaxError(pos_, "trailing input");
    return o;
  }

private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void open() {
    skip();
    if (peek() != '(') throw OutlineSyntaxError(pos_, "expected '('");
    ++pos_;
  }
  void close() {
    skip();
    if (peek() != ')') throw OutlineSyntaxError(pos_, "expected ')'");
    ++pos_;
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-';
  }

  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
    if (pos_ == start) throw OutlineSyntaxError(start, "expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  uint32_t number() {
    skip();
    const std::size_t start = pos_;
    if (peek() == '-') throw OutlineSyntaxError(start, "negative budget");
    uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<uint64_t>(text_[pos_++] - '0');
      if (v > std::numeric_limits<uint32_t>::max()) throw OutlineSyntaxError(start, "budget too large");
    }
    if (pos_ == start) throw OutlineSyntaxError(start, "expected a number");
    if (word_char(peek())) throw OutlineSyntaxError(start, "expected a number");
    return static_cast<uint32_t>(v);
  }

  std::vector<Sym> lemma_list_body() {
    std::vector<Sym> out;
    for (skip(); peek() != ')' && peek() != '\0'; skip()) out.push_back(Sym::intern(word()));
    close();
    return out;
  }

  std::vector<Sym> lemma_list() {
    open();
    const std::size_t at = (skip(), pos_);
    if (word() != "lemmas") throw OutlineSyntaxError(at, "expected 'lemmas'");
    return lemma_list_body();
  }

  std::shared_ptr<const OutlineNode> node() {
    open();
    const std::size_t at = (skip(), pos_);
    const std::string head = word();
    auto n = std::make_shared<OutlineNode>();
    if (head == "lemmas") {
      n->lemmas = lemma_list_body();
    } else if (head == "split") {
      n->left = node();
      n->right = node();
      close();
    } else {
      throw OutlineSyntaxError(at, "expected 'lemmas' or 'split'");
    }
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_names(std::string& out, const std::vector<Sym>& names) {
  out += "(lemmas";
  for (const auto& n : names) out += " " + n.name();
  out += ")";
}

void print_node(std::string& out, const OutlineNode& n) {
  if (!n.is_split()) return print_names(out, n.lemmas);
  out += "(split ";
  print_node(out, *n.left);
  out += " ";
  print_node(out, *n.right);
  out += ")";
}

void collect_node(const OutlineNode& n, std::vector<Sym>& out) {
  if (n.is_split()) {
    collect_node(*n.left, out);
    collect_node(*n.right, out);
    return;
  }
  for (const auto& s : n.lemmas)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
}

}  // namespace

Outline parse_outline(std::string_view text) { return OutlineParser(text).parse(); }

std::string print_outline(const Outline& o) {
  const auto num = [](uint32_t v) { return std::to_string(v); };
  std::string out;
  switch (o.kind) {
    case Outline::Kind::Induction:
      out = "(induction " + num(o.decides) + " " + num(o.unfold_left) + " " + num(o.unfold_right) + ")";
      break;
    case Outline::Kind::WithLemmas:
      out = "(induction " + num(o.decides) + " ";
      print_names(out, o.lemmas);
      out += " " + num(o.unfold_left) + " " + num(o.unfold_right) + ")";
      break;
    case Outline::Kind::Tree:
      out = "(tree " + num(o.decides) + " " + num(o.unfold_left) + " " + num(o.unfold_right) + " ";
      print_node(out, *o.tree);
      out += ")";
      break;
  }
  return out;
}

std::vector<Sym> outline_lemmas(const Outline& o) {
  std::vector<Sym> out;
  for (const auto& s : o.lemmas)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  if (o.tree) collect_node(*o.tree, out);
  return out;
}

// --- the FPC ---------------------------------------------------------------

namespace {

struct OutlineState final : CertNode {
  uint32_t decides = 0;
  uint32_t unfold_left = 0;
  uint32_t unfold_right = 0;
  // Which lemmas a decide may pick: all, a fixed list, or the current tree
  // position (no lemmas at a split that has not been reached yet).
  Outline::Kind kind = Outline::Kind::Induction;
  std::shared_ptr<const std::vector<Sym>> allowed;
  std::shared_ptr<const OutlineNode> node;
  bool before_induction = true;
  // Something was stored before the induction: a fixed point was passed
  // over, so the proof may not be closed without inducting on another.
  bool passed_over = false;
  uint32_t hyps = 0;

  bool induction_pending() const { return before_induction && passed_over; }

  bool lemma_allowed(Sym name) const {
    switch (kind) {
      case Outline::Kind::Induction: return true;
      case Outline::Kind::WithLemmas:
        return std::find(allowed->begin(), allowed->end(), name) != allowed->end();
      case Outline::Kind::Tree:
        return !node->is_split() && std::find(node->lemmas.begin(), node->lemmas.end(), name) != node->lemmas.end();
    }
    return false;
  }
};

const OutlineState& state(const Cert& c) {
  const auto* s = dynamic_cast<const OutlineState*>(c.get());
  if (!s) throw std::invalid_argument("not an outline certificate");
  return *s;
}

template <class Fn>
Cert derive(const Cert& c, Fn&& fn) {
  auto s = std::make_shared<OutlineState>(state(c));
  fn(*s);
  return s;
}

Cert after(const Cert& c) {
  if (!state(c).before_induction) return c;
  return derive(c, [](OutlineState& s) { s.before_induction = false; });
}

// Splits the lemma tree when positioned at a split node.
std::pair<Cert, Cert> split(const Cert& c) {
  const OutlineState& s = state(c);
  if (s.kind != Outline::Kind::Tree || !s.node->is_split()) return {c, c};
  return {derive(c, [&](OutlineState& t) { t.node = s.node->left; }),
          derive(c, [&](OutlineState& t) { t.node = s.node->right; })};
}

class OutlineFpc final : public FpcDefinition {
public:
  std::string_view name() const override { return "outline"; }

  Cert parse_certificate(std::string_view text) const override { return outline_cert(parse_outline(text)); }

  std::optional<std::string> validate(const Cert& c, std::span<const Sym> lemmas) const override {
    const OutlineState& s = state(c);
    std::vector<Sym> named;
    if (s.kind == Outline::Kind::WithLemmas) named = *s.allowed;
    if (s.kind == Outline::Kind::Tree) {
      Outline o;
      o.kind = Outline::Kind::Tree;
      o.tree = s.node;
      named = outline_lemmas(o);
    }
    for (const auto& n : named)
      if (std::find(lemmas.begin(), lemmas.end(), n) == lemmas.end()) return "unknown lemma " + n.name();
    return std::nullopt;
  }

  // Every smaller budget triple, by increasing total, then the certificate
  // itself. A larger certificate thus never loses a proof a smaller one finds
  // to a search that wanders off first.
  std::vector<Cert> schedule(const Cert& c) const override {
    const OutlineState& s = state(c);
    std::vector<std::array<uint32_t, 3>> triples;
    for (uint32_t d = 0; d <= s.decides; ++d)
      for (uint32_t a = 0; a <= s.unfold_left; ++a)
        for (uint32_t u = 0; u <= s.unfold_right; ++u)
          if (d != s.decides || a != s.unfold_left || u != s.unfold_right) triples.push_back({d, a, u});
    std::stable_sort(triples.begin(), triples.end(), [](const auto& x, const auto& y) {
      return x[0] + x[1] + x[2] < y[0] + y[1] + y[2];
    });
    std::vector<Cert> out;
    for (const auto& t : triples)
      out.push_back(derive(c, [&](OutlineState& r) {
        r.decides = t[0];
        r.unfold_left = t[1];
        r.unfold_right = t[2];
      }));
    out.push_back(c);
    return out;
  }

  std::vector<std::pair<Cert, Index>> store_clerk(const Cert& c) const override {
    const uint32_t serial = state(c).hyps + 1;
    return {{derive(c,
                    [&](OutlineState& s) {
                      s.hyps = serial;
                      s.passed_over = s.passed_over || s.before_induction;
                    }),
             Index::hyp(serial)}};
  }

  std::vector<std::pair<Cert, Cert>> or_left_clerk(const Cert& c) const override { return {split(c)}; }

  std::vector<std::pair<Cert, Index>> decide_expert(const Cert& c, std::span<const Index> candidates) const override {
    const OutlineState& s = state(c);
    if (s.decides == 0 || s.induction_pending()) return {};
    const Cert next = derive(c, [](OutlineState& t) {
      --t.decides;
      t.before_induction = false;
    });
    std::vector<std::pair<Cert, Index>> out;
    for (const auto& idx : candidates)
      if (!idx.is_lemma() || s.lemma_allowed(idx.lemma)) out.emplace_back(next, idx);
    return out;
  }

  std::vector<Cert> decide_right_expert(const Cert& c) const override {
    if (state(c).induction_pending()) return {};
    return {after(c)};
  }

  std::vector<std::pair<Cert, Side>> or_expert(const Cert& c) const override {
    return {{c, Side::Left}, {c, Side::Right}};
  }

  std::vector<std::pair<Cert, TermChoice>> some_expert(const Cert& c) const override {
    return {{c, std::nullopt}};
  }

  std::vector<std::pair<Cert, Cert>> and_expert(const Cert& c) const override { return {split(c)}; }

  std::vector<Cert> unfold_left_expert(const Cert& c) const override {
    const OutlineState& s = state(c);
    if (s.before_induction || s.unfold_left == 0) return {};
    return {derive(c, [](OutlineState& t) { --t.unfold_left; })};
  }

  std::vector<Cert> unfold_right_expert(const Cert& c) const override {
    if (state(c).unfold_right == 0) return {};
    return {derive(c, [](OutlineState& t) {
      --t.unfold_right;
      t.before_induction = false;
    })};
  }

  std::vector<InductionChoice> ind_expert(const Cert& c) const override {
    if (!state(c).before_induction) return {};
    const Cert next = after(c);
    return {{next, next, ObviousInvariant{}}};
  }

  std::vector<InitialChoice> initial_expert(const Cert&) const override { return {AnyFrozen{}}; }
};

}  // namespace

Cert outline_cert(const Outline& o) {
  auto s = std::make_shared<OutlineState>();
  s->kind = o.kind;
  s->decides = o.decides;
  s->unfold_left = o.unfold_left;
  s->unfold_right = o.unfold_right;
  s->allowed = std::make_shared<const std::vector<Sym>>(o.lemmas);
  s->node = o.tree ? o.tree : std::make_shared<const OutlineNode>();
  return s;
}

const FpcDefinition& outline_fpc() {
  static const OutlineFpc fpc;
  return fpc;
}

}  // namespace acheck
