#include "fiklik/json_io.hpp"

#include <fstream>
#include <sstream>

namespace fiklik {

using nlohmann::json;

namespace {

int require_world(const Frame& f, const std::string& name) {
    int i = f.world_index(name);
    if (i < 0) throw Error("MODEL_BAD_REF", "unknown world reference '" + name + "'");
    return i;
}

std::vector<std::pair<int, int>> read_pairs(const Frame& f, const json& arr, const char* field) {
    std::vector<std::pair<int, int>> out;
    if (!arr.is_array()) throw Error("MODEL_PARSE", std::string(field) + " must be an array");
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw Error("MODEL_PARSE", std::string(field) + " entries must be world-name pairs");
        out.emplace_back(require_world(f, e[0].get<std::string>()),
                         require_world(f, e[1].get<std::string>()));
    }
    return out;
}

}  // namespace

Frame frame_from_json(const json& j) {
    if (!j.is_object() || !j.contains("worlds") || !j["worlds"].is_array())
        throw Error("MODEL_PARSE", "model file must be an object with a 'worlds' array");
    Frame f;
    for (const auto& w : j["worlds"]) {
        if (!w.is_string()) throw Error("MODEL_PARSE", "world names must be strings");
        std::string name = w.get<std::string>();
        if (f.world_index(name) >= 0)
            throw Error("MODEL_BAD_REF", "duplicate world name '" + name + "'");
        f.world_names.push_back(std::move(name));
    }
    if (f.size() == 0) throw Error("MODEL_PARSE", "worlds must be nonempty");
    if (f.size() > kMaxWorlds)
        throw Error("MODEL_PARSE", "at most " + std::to_string(kMaxWorlds) + " worlds supported");

    f.le = preorder_closure(read_pairs(f, j.value("le", json::array()), "le"), f.size());
    f.r.assign(f.size(), 0);
    for (auto [a, b] : read_pairs(f, j.value("r", json::array()), "r")) f.r[a] |= bit(b);
    return f;
}

Model model_from_json(const json& j, bool strict) {
    Model m{frame_from_json(j), {}};
    const json val = j.value("val", json::object());
    if (!val.is_object()) throw Error("MODEL_PARSE", "val must be an object");
    for (auto it = val.begin(); it != val.end(); ++it) {
        WorldMask mask = 0;
        if (!it.value().is_array())
            throw Error("MODEL_PARSE", "val entries must be world-name arrays");
        for (const auto& w : it.value()) {
            if (!w.is_string()) throw Error("MODEL_PARSE", "val entries must be world names");
            mask |= bit(require_world(m.frame, w.get<std::string>()));
        }
        m.val[it.key()] = mask;
    }
    if (strict) {
        for (const auto& [p, mask] : m.val)
            for (int i = 0; i < m.frame.size(); ++i)
                if (has(mask, i) && (m.frame.le[i] & ~mask))
                    throw Error("MODEL_VAL_NOT_CLOSED",
                                "valuation of '" + p + "' is not <=-closed at world " +
                                    m.frame.world_names[i]);
    }
    return m;
}

json model_to_json(const Model& m) {
    const Frame& f = m.frame;
    json j;
    j["worlds"] = f.world_names;
    json le = json::array();
    for (int i = 0; i < f.size(); ++i)
        for (int k = 0; k < f.size(); ++k)
            if (i != k && f.le_holds(i, k))
                le.push_back({f.world_names[i], f.world_names[k]});
    j["le"] = std::move(le);
    json r = json::array();
    for (int i = 0; i < f.size(); ++i)
        for (int k = 0; k < f.size(); ++k)
            if (f.r_holds(i, k)) r.push_back({f.world_names[i], f.world_names[k]});
    j["r"] = std::move(r);
    json val = json::object();
    for (const auto& [p, mask] : m.val) {
        json ws = json::array();
        for (int i = 0; i < f.size(); ++i)
            if (has(mask, i)) ws.push_back(f.world_names[i]);
        val[p] = std::move(ws);
    }
    j["val"] = std::move(val);
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FILE_IO", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("MODEL_PARSE", "invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("FILE_IO", "cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

Model load_model_file(const std::string& path, bool strict) {
    return model_from_json(load_json_file(path), strict);
}

Frame load_frame_file(const std::string& path) {
    return frame_from_json(load_json_file(path));
}

std::string model_to_dot(const Model& m) {
    const Frame& f = m.frame;
    int n = f.size();
    std::ostringstream out;
    out << "digraph model {\n";
    for (int i = 0; i < n; ++i) {
        std::string atoms;
        for (const auto& [p, mask] : m.val)
            if (has(mask, i)) atoms += atoms.empty() ? p : ("," + p);
        out << "  n" << i << " [label=\"" << f.world_names[i];
        if (!atoms.empty()) out << "\\n" << atoms;
        out << "\"];\n";
    }

    // Cluster representatives: lowest index of each <=-equivalence class.
    std::vector<int> rep(n);
    for (int i = 0; i < n; ++i) {
        rep[i] = i;
        for (int j = 0; j < i; ++j)
            if (f.le_holds(i, j) && f.le_holds(j, i)) {
                rep[i] = rep[j];
                break;
            }
    }
    // Within a cluster of size > 1: a single cycle in index order.
    for (int a = 0; a < n; ++a) {
        if (rep[a] != a) continue;
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (rep[i] == a) members.push_back(i);
        if (members.size() > 1) {
            for (std::size_t k = 0; k < members.size(); ++k)
                out << "  n" << members[k] << " -> n" << members[(k + 1) % members.size()]
                    << " [style=dashed];\n";
        }
    }
    // Across clusters: transitive reduction of the quotient order, drawn
    // between representatives.
    for (int a = 0; a < n; ++a) {
        if (rep[a] != a) continue;
        for (int b = 0; b < n; ++b) {
            if (rep[b] != b || a == b || !f.lt_holds(a, b)) continue;
            bool direct = true;
            for (int c = 0; c < n && direct; ++c)
                if (rep[c] == c && c != a && c != b && f.lt_holds(a, c) && f.lt_holds(c, b))
                    direct = false;
            if (direct) out << "  n" << a << " -> n" << b << " [style=dashed];\n";
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (f.r_holds(i, j)) out << "  n" << i << " -> n" << j << ";\n";
    out << "}\n";
    return out.str();
}

}  // namespace fiklik
