#pragma once

#include "cdad/hybrid_model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace cdad {

/// Parses the model document. Unknown keys are rejected with ModelError. The
/// optional top-level "scenario" object is left for the simulator to read.
HybridAutomaton model_from_json(const nlohmann::json& doc);
HybridAutomaton parse_model(const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);
HybridAutomaton load_model(const std::filesystem::path& path);

nlohmann::json model_to_json(const HybridAutomaton& model);

/// Helpers shared with the scenario parser.
namespace io {
void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where);
Vector to_vector(const nlohmann::json& arr, const std::string& where);
Matrix to_matrix(const nlohmann::json& rows, const std::string& where);
nlohmann::json from_vector(const Vector& v);
nlohmann::json from_matrix(const Matrix& m);
}  // namespace io

}  // namespace cdad
