#ifndef FIKLIK_JSON_IO_HPP
#define FIKLIK_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "fiklik/kripke.hpp"

namespace fiklik {

// Model file format:
//   {"worlds":["w0","w1"],"le":[["w0","w1"]],"r":[["w0","w1"]],"val":{"p":["w1"]}}
// The loader closes `le` reflexive-transitively. With strict=true it rejects
// valuations that are not up-closed (MODEL_VAL_NOT_CLOSED) and unknown world
// references (MODEL_BAD_REF); strict=false keeps a syntactically well-formed
// but semantically broken valuation so a verifier can report it.
Model model_from_json(const nlohmann::json& j, bool strict = true);
nlohmann::json model_to_json(const Model& m);

Model load_model_file(const std::string& path, bool strict = true);
void save_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

// Frame-only load: same format, `val` ignored.
Frame frame_from_json(const nlohmann::json& j);
Frame load_frame_file(const std::string& path);

// DOT export: le (non-reflexive, transitively reduced; cluster cycles kept as
// a cycle) dashed, r solid, valuation in node labels.
std::string model_to_dot(const Model& m);

}  // namespace fiklik

#endif
