#include "fiklik/formula.hpp"

#include <algorithm>
#include <cassert>

namespace fiklik {

Formula::Formula() : node_() { *this = top(); }

Formula Formula::atom(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Conn::Atom;
    n->atom = std::move(name);
    return Formula(std::move(n));
}

Formula Formula::top() {
    static const Formula t = [] {
        auto n = std::make_shared<Node>();
        n->kind = Conn::Top;
        return Formula(std::move(n));
    }();
    return t;
}

Formula Formula::bot() {
    static const Formula b = [] {
        auto n = std::make_shared<Node>();
        n->kind = Conn::Bot;
        return Formula(std::move(n));
    }();
    return b;
}

Formula Formula::impl(Formula a, Formula b) {
    auto n = std::make_shared<Node>();
    n->kind = Conn::Impl;
    n->a = a.node_;
    n->b = b.node_;
    return Formula(std::move(n));
}

Formula Formula::conj(Formula a, Formula b) {
    auto n = std::make_shared<Node>();
    n->kind = Conn::And;
    n->a = a.node_;
    n->b = b.node_;
    return Formula(std::move(n));
}

Formula Formula::disj(Formula a, Formula b) {
    auto n = std::make_shared<Node>();
    n->kind = Conn::Or;
    n->a = a.node_;
    n->b = b.node_;
    return Formula(std::move(n));
}

Formula Formula::box(Formula a) {
    auto n = std::make_shared<Node>();
    n->kind = Conn::Box;
    n->a = a.node_;
    return Formula(std::move(n));
}

Formula Formula::dia(Formula a) {
    auto n = std::make_shared<Node>();
    n->kind = Conn::Dia;
    n->a = a.node_;
    return Formula(std::move(n));
}

const std::string& Formula::atom_name() const {
    assert(node_->kind == Conn::Atom);
    return node_->atom;
}

Formula Formula::left() const {
    assert(node_->a);
    return Formula(node_->a);
}

Formula Formula::right() const {
    assert(node_->b);
    return Formula(node_->b);
}

Formula Formula::body() const { return left(); }

int Formula::compare(const Node* x, const Node* y) {
    if (x == y) return 0;
    if (x->kind != y->kind)
        return static_cast<int>(x->kind) < static_cast<int>(y->kind) ? -1 : 1;
    switch (x->kind) {
        case Conn::Atom:
            return x->atom.compare(y->atom);
        case Conn::Top:
        case Conn::Bot:
            return 0;
        case Conn::Box:
        case Conn::Dia:
            return compare(x->a.get(), y->a.get());
        default: {
            int c = compare(x->a.get(), y->a.get());
            if (c != 0) return c;
            return compare(x->b.get(), y->b.get());
        }
    }
}

bool operator==(const Formula& a, const Formula& b) {
    return Formula::compare(a.node_.get(), b.node_.get()) == 0;
}

bool operator<(const Formula& a, const Formula& b) {
    return Formula::compare(a.node_.get(), b.node_.get()) < 0;
}

std::size_t formula_length(const Formula& f) {
    switch (f.kind()) {
        case Conn::Atom:
        case Conn::Top:
        case Conn::Bot:
            return 1;
        case Conn::Box:
        case Conn::Dia:
            return 1 + formula_length(f.body());
        default:
            return 1 + formula_length(f.left()) + formula_length(f.right());
    }
}

static void collect_atoms(const Formula& f, std::set<std::string>& out) {
    switch (f.kind()) {
        case Conn::Atom:
            out.insert(f.atom_name());
            return;
        case Conn::Top:
        case Conn::Bot:
            return;
        case Conn::Box:
        case Conn::Dia:
            collect_atoms(f.body(), out);
            return;
        default:
            collect_atoms(f.left(), out);
            collect_atoms(f.right(), out);
            return;
    }
}

std::vector<std::string> atoms_of(const Formula& f) {
    std::set<std::string> s;
    collect_atoms(f, s);
    return {s.begin(), s.end()};
}

Formula substitute(const Formula& f, const std::map<std::string, Formula>& binding) {
    switch (f.kind()) {
        case Conn::Atom: {
            auto it = binding.find(f.atom_name());
            return it == binding.end() ? f : it->second;
        }
        case Conn::Top:
        case Conn::Bot:
            return f;
        case Conn::Box:
            return Formula::box(substitute(f.body(), binding));
        case Conn::Dia:
            return Formula::dia(substitute(f.body(), binding));
        case Conn::Impl:
            return Formula::impl(substitute(f.left(), binding), substitute(f.right(), binding));
        case Conn::And:
            return Formula::conj(substitute(f.left(), binding), substitute(f.right(), binding));
        case Conn::Or:
            return Formula::disj(substitute(f.left(), binding), substitute(f.right(), binding));
    }
    throw Error("INTERNAL", "unreachable formula kind");
}

static void closure_into(const Formula& f, FormulaSet& out) {
    if (!out.insert(f).second) return;
    switch (f.kind()) {
        case Conn::Atom:
        case Conn::Top:
        case Conn::Bot:
            return;
        case Conn::Box:
        case Conn::Dia:
            closure_into(f.body(), out);
            return;
        default:
            closure_into(f.left(), out);
            closure_into(f.right(), out);
            return;
    }
}

ClosureSet closure_of(const Formula& a) {
    ClosureSet cs{{}, a};
    closure_into(a, cs.members);
    return cs;
}

bool is_closed(const FormulaSet& g) {
    for (const Formula& f : g) {
        switch (f.kind()) {
            case Conn::Impl:
            case Conn::And:
            case Conn::Or:
                if (!g.count(f.left()) || !g.count(f.right())) return false;
                break;
            case Conn::Box:
            case Conn::Dia:
                if (!g.count(f.body())) return false;
                break;
            default:
                break;
        }
    }
    return true;
}

FormulaSet modal_step(const FormulaSet& g) {
    FormulaSet out;
    for (const Formula& f : g) {
        if (f.is(Conn::Box) || f.is(Conn::Dia)) closure_into(f.body(), out);
    }
    return out;
}

FormulaSet closure_iterate(const FormulaSet& g, unsigned alpha) {
    FormulaSet cur = g;
    for (unsigned i = 0; i < alpha; ++i) cur = modal_step(cur);
    return cur;
}

}  // namespace fiklik
