#ifndef FIKLIK_FORMULA_HPP
#define FIKLIK_FORMULA_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fiklik {

// Base error type carrying a stable machine-readable code next to the
// human-readable message.
struct Error : std::runtime_error {
    std::string code;
    Error(std::string code_, const std::string& msg)
        : std::runtime_error(msg), code(std::move(code_)) {}
};

enum class Conn : std::uint8_t { Atom, Top, Bot, Impl, And, Or, Box, Dia };

// Immutable formula AST with value semantics. Negation is not a
// constructor: ~A is represented as Impl(A, Bot).
class Formula {
public:
    Formula();  // defaults to Top so formula-bearing aggregates stay regular
    static Formula atom(std::string name);
    static Formula top();
    static Formula bot();
    static Formula impl(Formula a, Formula b);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula box(Formula a);
    static Formula dia(Formula a);
    static Formula neg(Formula a) { return impl(std::move(a), bot()); }

    Conn kind() const { return node_->kind; }
    bool is(Conn k) const { return node_->kind == k; }
    const std::string& atom_name() const;
    Formula left() const;   // Impl/And/Or
    Formula right() const;  // Impl/And/Or
    Formula body() const;   // Box/Dia

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
    // Total structural order; used as the canonical formula order everywhere
    // deterministic iteration is required.
    friend bool operator<(const Formula& a, const Formula& b);

private:
    struct Node {
        Conn kind;
        std::string atom;        // Atom only
        std::shared_ptr<const Node> a, b;
    };
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static int compare(const Node* x, const Node* y);
    std::shared_ptr<const Node> node_;
};

using FormulaSet = std::set<Formula>;

// A subset of some Sigma_root together with the root it was derived from.
struct ClosureSet {
    FormulaSet members;
    Formula root;
};

// Number of non-parenthesis symbols: atoms, constants and connectives.
std::size_t formula_length(const Formula& f);

// Atom names occurring in f, in sorted order.
std::vector<std::string> atoms_of(const Formula& f);

// Simultaneous substitution of atoms; atoms absent from the binding stay.
Formula substitute(const Formula& f, const std::map<std::string, Formula>& binding);

// The least closed set containing a.
ClosureSet closure_of(const Formula& a);

bool is_closed(const FormulaSet& g);

// One modal step: union of Sigma_B over all Box B / Dia B in g.
FormulaSet modal_step(const FormulaSet& g);

// alpha-fold iteration of modal_step starting from g.
FormulaSet closure_iterate(const FormulaSet& g, unsigned alpha);

// ---------------------------------------------------------------------------
// Concrete surface syntax.
//
//   atoms [a-z][a-zA-Z0-9_]*, constants `true` `false`,
//   unary ~ [] <>, binary & | ->, parentheses.
//   Precedence: unary > & > | > ->;  -> is right-associative, & and | are
//   left-associative.  Unicode aliases accepted on input, ASCII emitted.
// ---------------------------------------------------------------------------

struct ParseError : Error {
    std::size_t offset;                  // byte offset into the input
    std::vector<std::string> expected;   // acceptable tokens at that point
    ParseError(std::size_t off, std::vector<std::string> exp, const std::string& msg)
        : Error("FORMULA_SYNTAX", msg), offset(off), expected(std::move(exp)) {}
};

Formula parse_formula(std::string_view text);

// Minimal-parentheses rendering; parse_formula(render(f)) == f.
std::string render(const Formula& f);

}  // namespace fiklik

#endif
