#include "fiklik/kripke.hpp"

#include <algorithm>
#include <bit>
#include <random>

namespace fiklik {

int Frame::world_index(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (world_names[i] == name) return i;
    return -1;
}

std::vector<std::string> Frame::default_names(int n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (int i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
    return names;
}

std::string FrameClass::name() const {
    if (bits == 0) return "all";
    std::string s;
    if (needs(Confluence::Forward)) s += 'f';
    if (needs(Confluence::Backward)) s += 'b';
    if (needs(Confluence::Downward)) s += 'd';
    if (needs(Confluence::Upward)) s += 'u';
    return s + "c";
}

std::optional<FrameClass> FrameClass::from_name(const std::string& n) {
    if (n == "all") return all();
    if (n.size() < 2 || n.back() != 'c') return std::nullopt;
    FrameClass c = all();
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        switch (n[i]) {
            case 'f': c = join(c, fc()); break;
            case 'b': c = join(c, bc()); break;
            case 'd': c = join(c, dc()); break;
            case 'u': c = join(c, uc()); break;
            default: return std::nullopt;
        }
    }
    return c;
}

std::vector<WorldMask> preorder_closure(const std::vector<std::pair<int, int>>& pairs, int n) {
    std::vector<WorldMask> le(n);
    for (int i = 0; i < n; ++i) le[i] = bit(i);
    for (auto [a, b] : pairs) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw Error("MODEL_BAD_REF", "relation pair references an unknown world");
        le[a] |= bit(b);
    }
    // Warshall closure over bit rows.
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (has(le[i], k)) le[i] |= le[k];
    return le;
}

bool one_confluence_holds(const Frame& f, Confluence c, ConfluenceViolation* out) {
    int n = f.size();
    auto fail = [&](int s, int t, int u) {
        if (out) *out = {c, s, t, u};
        return false;
    };
    switch (c) {
        case Confluence::Forward:
            // t <= s and t R u  =>  exists v: s R v and u <= v
            for (int t = 0; t < n; ++t)
                for (int s = 0; s < n; ++s) {
                    if (!f.le_holds(t, s)) continue;
                    for (int u = 0; u < n; ++u)
                        if (f.r_holds(t, u) && (f.r[s] & f.le[u]) == 0) return fail(s, t, u);
                }
            return true;
        case Confluence::Backward:
            // s R t and t <= u  =>  exists v: s <= v and v R u
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) {
                    if (!f.r_holds(s, t)) continue;
                    for (int u = 0; u < n; ++u) {
                        if (!f.le_holds(t, u)) continue;
                        bool ok = false;
                        for (int v = 0; v < n && !ok; ++v)
                            ok = f.le_holds(s, v) && f.r_holds(v, u);
                        if (!ok) return fail(s, t, u);
                    }
                }
            return true;
        case Confluence::Downward:
            // s <= t and t R u  =>  exists v: s R v and v <= u
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) {
                    if (!f.le_holds(s, t)) continue;
                    for (int u = 0; u < n; ++u) {
                        if (!f.r_holds(t, u)) continue;
                        bool ok = false;
                        for (int v = 0; v < n && !ok; ++v)
                            ok = f.r_holds(s, v) && f.le_holds(v, u);
                        if (!ok) return fail(s, t, u);
                    }
                }
            return true;
        case Confluence::Upward:
            // s R t and u <= t  =>  exists v: v <= s and v R u
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) {
                    if (!f.r_holds(s, t)) continue;
                    for (int u = 0; u < n; ++u) {
                        if (!f.le_holds(u, t)) continue;
                        bool ok = false;
                        for (int v = 0; v < n && !ok; ++v)
                            ok = f.le_holds(v, s) && f.r_holds(v, u);
                        if (!ok) return fail(s, t, u);
                    }
                }
            return true;
    }
    throw Error("INTERNAL", "unreachable confluence kind");
}

ClassCheckResult frame_class_check(const Frame& f, FrameClass c) {
    for (Confluence k : {Confluence::Forward, Confluence::Backward, Confluence::Downward,
                         Confluence::Upward}) {
        if (!c.needs(k)) continue;
        ConfluenceViolation v{};
        if (!one_confluence_holds(f, k, &v)) return {false, v};
    }
    return {true, std::nullopt};
}

std::string semantics_name(Semantics s) {
    switch (s) {
        case Semantics::Standard: return "std";
        case Semantics::FischerServi: return "fs";
        case Semantics::Wijesekera: return "w";
    }
    return "?";
}

std::optional<Semantics> semantics_from_name(const std::string& n) {
    if (n == "std") return Semantics::Standard;
    if (n == "fs") return Semantics::FischerServi;
    if (n == "w") return Semantics::Wijesekera;
    return std::nullopt;
}

bool satisfies(const Model& m, int world, const Formula& f, Semantics sem) {
    const Frame& fr = m.frame;
    int n = fr.size();
    switch (f.kind()) {
        case Conn::Atom:
            return has(m.atom_mask(f.atom_name()), world);
        case Conn::Top:
            return true;
        case Conn::Bot:
            return false;
        case Conn::And:
            return satisfies(m, world, f.left(), sem) && satisfies(m, world, f.right(), sem);
        case Conn::Or:
            return satisfies(m, world, f.left(), sem) || satisfies(m, world, f.right(), sem);
        case Conn::Impl:
            for (int t = 0; t < n; ++t)
                if (fr.le_holds(world, t) && satisfies(m, t, f.left(), sem) &&
                    !satisfies(m, t, f.right(), sem))
                    return false;
            return true;
        case Conn::Box:
            for (int t = 0; t < n; ++t) {
                if (!fr.le_holds(world, t)) continue;
                for (int u = 0; u < n; ++u)
                    if (fr.r_holds(t, u) && !satisfies(m, u, f.body(), sem)) return false;
            }
            return true;
        case Conn::Dia:
            switch (sem) {
                case Semantics::Standard:
                    for (int t = 0; t < n; ++t) {
                        if (!fr.le_holds(t, world)) continue;
                        for (int u = 0; u < n; ++u)
                            if (fr.r_holds(t, u) && satisfies(m, u, f.body(), sem)) return true;
                    }
                    return false;
                case Semantics::FischerServi:
                    for (int u = 0; u < n; ++u)
                        if (fr.r_holds(world, u) && satisfies(m, u, f.body(), sem)) return true;
                    return false;
                case Semantics::Wijesekera:
                    for (int t = 0; t < n; ++t) {
                        if (!fr.le_holds(world, t)) continue;
                        bool found = false;
                        for (int u = 0; u < n && !found; ++u)
                            found = fr.r_holds(t, u) && satisfies(m, u, f.body(), sem);
                        if (!found) return false;
                    }
                    return true;
            }
            return false;
    }
    throw Error("INTERNAL", "unreachable formula kind");
}

WorldMask ModelEvaluator::eval(const Formula& f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;
    const Frame& fr = m_->frame;
    int n = fr.size();
    WorldMask res = 0;
    switch (f.kind()) {
        case Conn::Atom:
            res = m_->atom_mask(f.atom_name());
            break;
        case Conn::Top:
            res = fr.all();
            break;
        case Conn::Bot:
            res = 0;
            break;
        case Conn::And:
            res = eval(f.left()) & eval(f.right());
            break;
        case Conn::Or:
            res = eval(f.left()) | eval(f.right());
            break;
        case Conn::Impl: {
            WorldMask ok = ~(eval(f.left()) & ~eval(f.right())) & fr.all();
            for (int w = 0; w < n; ++w)
                if ((fr.le[w] & ~ok) == 0) res |= bit(w);
            break;
        }
        case Conn::Box: {
            WorldMask sb = eval(f.body());
            WorldMask good = 0;  // worlds all of whose R-successors satisfy body
            for (int t = 0; t < n; ++t)
                if ((fr.r[t] & ~sb) == 0) good |= bit(t);
            for (int w = 0; w < n; ++w)
                if ((fr.le[w] & ~good) == 0) res |= bit(w);
            break;
        }
        case Conn::Dia: {
            WorldMask sb = eval(f.body());
            WorldMask hit = 0;  // worlds with an R-successor satisfying body
            for (int t = 0; t < n; ++t)
                if (fr.r[t] & sb) hit |= bit(t);
            switch (sem_) {
                case Semantics::Standard:
                    // below[w] intersects hit, where below = le-predecessors
                    for (int t = 0; t < n; ++t)
                        if (has(hit, t)) res |= fr.le[t];
                    break;
                case Semantics::FischerServi:
                    res = hit;
                    break;
                case Semantics::Wijesekera:
                    for (int w = 0; w < n; ++w)
                        if ((fr.le[w] & ~hit) == 0) res |= bit(w);
                    break;
            }
            break;
        }
    }
    memo_.emplace(f, res);
    return res;
}

bool true_in_model(const Model& m, const Formula& a) {
    ModelEvaluator ev(m);
    return ev.eval(a) == m.frame.all();
}

int lowest_clear_bit(const WorldMask& m) {
    for (int k = 0; k < 4; ++k)
        if (~m.limbs[k] != 0) return 64 * k + std::countr_one(m.limbs[k]);
    return 256;
}

std::vector<WorldMask> upsets_of(const Frame& f) {
    if (f.size() > 30)
        throw Error("ENUM_SIZE", "up-set enumeration supports at most 30 worlds");
    std::vector<WorldMask> out;
    std::uint64_t end = std::uint64_t{1} << f.size();
    for (std::uint64_t raw = 0; raw < end; ++raw) {
        WorldMask mset{raw};
        bool closed = true;
        for (int i = 0; i < f.size() && closed; ++i)
            if (has(mset, i) && (f.le[i] & ~mset)) closed = false;
        if (closed) out.push_back(mset);
    }
    return out;
}

ValuationEnumerator::ValuationEnumerator(const Frame& f, std::vector<std::string> atoms)
    : atoms_(std::move(atoms)), upsets_(upsets_of(f)), idx_(atoms_.size(), 0) {}

std::uint64_t ValuationEnumerator::count() const {
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < atoms_.size(); ++i) c *= upsets_.size();
    return c;
}

std::optional<Valuation> ValuationEnumerator::next() {
    if (done_) return std::nullopt;
    Valuation v;
    for (std::size_t i = 0; i < atoms_.size(); ++i) v[atoms_[i]] = upsets_[idx_[i]];
    // odometer: last atom cycles fastest
    std::size_t i = atoms_.size();
    while (i > 0) {
        --i;
        if (++idx_[i] < upsets_.size()) break;
        idx_[i] = 0;
        if (i == 0) done_ = true;
    }
    if (atoms_.empty()) done_ = true;
    return v;
}

ValidityResult valid_in_frame(const Frame& f, const Formula& a) {
    ValuationEnumerator vals(f, atoms_of(a));
    while (auto v = vals.next()) {
        Model m{f, *v};
        ModelEvaluator ev(m);
        WorldMask sat = ev.eval(a);
        if (sat != f.all()) {
            int w = lowest_clear_bit(sat);  // lowest world index falsifying a
            return {false, std::move(*v), w};
        }
    }
    return {true, std::nullopt, std::nullopt};
}

std::vector<std::vector<WorldMask>> enumerate_preorders(int n) {
    std::vector<std::vector<WorldMask>> out;
    std::uint64_t end = std::uint64_t{1} << (n * n);
    std::vector<WorldMask> rows(n);
    for (std::uint64_t mask = 0; mask < end; ++mask) {
        for (int i = 0; i < n; ++i)
            rows[i] = static_cast<WorldMask>((mask >> (i * n)) & ((std::uint64_t{1} << n) - 1));
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (!has(rows[i], i)) ok = false;  // reflexive
            for (int j = 0; j < n && ok; ++j)
                if (has(rows[i], j) && (rows[j] & ~rows[i])) ok = false;  // transitive
        }
        if (ok) out.push_back(rows);
    }
    return out;
}

namespace {

std::vector<std::vector<WorldMask>> checked_preorders(int size) {
    if (size < 1 || size > 5)
        throw Error("ENUM_SIZE",
                    "frame enumeration supports sizes 1..5, got " + std::to_string(size));
    return enumerate_preorders(size);
}

}  // namespace

FrameEnumerator::FrameEnumerator(int size, FrameClass c)
    : n_(size), class_(c), preorders_(checked_preorders(size)) {
    rel_end_ = std::uint64_t{1} << (n_ * n_);
}

std::optional<Frame> FrameEnumerator::next() {
    while (pre_idx_ < preorders_.size()) {
        while (rel_mask_ < rel_end_) {
            Frame f;
            f.world_names = Frame::default_names(n_);
            f.le = preorders_[pre_idx_];
            f.r.resize(n_);
            for (int i = 0; i < n_; ++i)
                f.r[i] = static_cast<WorldMask>((rel_mask_ >> (i * n_)) & ((std::uint64_t{1} << n_) - 1));
            ++rel_mask_;
            ++seq_;
            if (frame_class_check(f, class_).ok) return f;
        }
        rel_mask_ = 0;
        ++pre_idx_;
    }
    return std::nullopt;
}

namespace {

// Thin deterministic RNG wrapper; reductions are explicit so streams do not
// depend on distribution internals.
struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    std::uint64_t raw() { return g(); }
    int below(int n) { return static_cast<int>(raw() % static_cast<std::uint64_t>(n)); }
    bool chance(double p) { return (raw() >> 11) * 0x1.0p-53 < p; }
};

}  // namespace

Model random_model(std::uint64_t seed, int size, FrameClass c,
                   const std::vector<std::string>& atoms) {
    if (size < 1 || size > kMaxWorlds)
        throw Error("MODEL_SIZE", "random_model size out of range");
    Rng rng(seed);

    Frame f;
    f.world_names = Frame::default_names(size);
    std::vector<std::pair<int, int>> le_pairs;
    int extra = rng.below(size * 2 + 1);
    for (int i = 0; i < extra; ++i) le_pairs.emplace_back(rng.below(size), rng.below(size));
    f.le = preorder_closure(le_pairs, size);

    f.r.assign(size, 0);
    int edges = rng.below(size * 2 + 1);
    for (int i = 0; i < edges; ++i) f.r[rng.below(size)] |= bit(rng.below(size));

    // Close R under the requested confluences: each condition can always be
    // met by adding the direct edge s R u (take v = u or v = s).
    bool changed = true;
    while (changed) {
        changed = false;
        for (Confluence k : {Confluence::Forward, Confluence::Backward, Confluence::Downward,
                             Confluence::Upward}) {
            if (!c.needs(k)) continue;
            ConfluenceViolation v{};
            while (!one_confluence_holds(f, k, &v)) {
                // Every confluence condition is witnessed by the direct edge
                // s R u (take v = u for forward/downward, v = s otherwise).
                f.r[v.s] |= bit(v.u);
                changed = true;
            }
        }
    }
    if (!frame_class_check(f, c).ok)
        throw Error("MODEL_GENERATION", "random_model could not reach the requested class, seed " +
                                            std::to_string(seed));

    Model m{std::move(f), {}};
    for (const auto& p : atoms) {
        WorldMask raw = static_cast<WorldMask>(rng.raw()) & m.frame.all();
        WorldMask closed = 0;
        for (int i = 0; i < size; ++i)
            if (has(raw, i)) closed |= m.frame.le[i];
        m.val[p] = closed;
    }
    return m;
}

QuotientResult quotient_clusters(const Model& m) {
    const Frame& f = m.frame;
    int n = f.size();
    std::vector<int> rep(n, -1);   // world -> representative (lowest index in cluster)
    std::vector<int> newidx(n, -1);
    std::vector<int> reps;
    for (int i = 0; i < n; ++i) {
        if (rep[i] != -1) continue;
        for (int j = i; j < n; ++j)
            if (f.le_holds(i, j) && f.le_holds(j, i)) rep[j] = i;
        newidx[i] = static_cast<int>(reps.size());
        reps.push_back(i);
    }

    QuotientResult out;
    int k = static_cast<int>(reps.size());
    out.world_map.resize(n);
    for (int i = 0; i < n; ++i) out.world_map[i] = newidx[rep[i]];

    Frame qf;
    qf.le.assign(k, 0);
    qf.r.assign(k, 0);
    for (int a = 0; a < k; ++a) {
        std::string name;
        for (int i = 0; i < n; ++i) {
            if (rep[i] != reps[a]) continue;
            if (!name.empty()) name += '+';
            name += f.world_names[i];
        }
        qf.world_names.push_back(std::move(name));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (f.le_holds(i, j)) qf.le[out.world_map[i]] |= bit(out.world_map[j]);
            if (f.r_holds(i, j)) qf.r[out.world_map[i]] |= bit(out.world_map[j]);
        }

    out.model.frame = std::move(qf);
    for (const auto& [p, mask] : m.val) {
        WorldMask qm = 0;
        for (int i = 0; i < n; ++i)
            if (has(mask, i)) qm |= bit(out.world_map[i]);
        out.model.val[p] = qm;
    }
    return out;
}

}  // namespace fiklik
