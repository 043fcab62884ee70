#pragma once

#include <string>

#include "json.hpp"

#include "cmap/core.hpp"
#include "cmap/mapping.hpp"
#include "cmap/source.hpp"
#include "cmap/trainer.hpp"

namespace cmap {

using Json = nlohmann::json;

// JSON documents:
//   {"type":"levels","values":[...],"v_min":..,"v_max":..}
//   {"type":"constellation","points":[[re,im],...]}
//   {"type":"qam","levels":{levels}}
//   {"type":"mrc","levels":{levels},"d_re":[...],"d_im":[...],"delta":20.0}
//   {"type":"mic","points":[[re,im],...],"delta":20.0,"v_min":-2.0,"v_max":2.0}
//   {"type":"identity","v_min":-2.0,"v_max":2.0}
//   {"type":"affine","gain":..,"bias":..}
// Doubles are written in shortest round-trip form, so save/load is bit-exact.
// Readers throw SchemaError with the path of the offending field.

Json to_json(const LevelSet& levels);
Json to_json(const Constellation& constellation);
Json to_json(const MappingParams& params);
Json to_json(const AffineDecoder& decoder);
Json to_json(const SourceSpec& source);

LevelSet levels_from_json(const Json& j, const std::string& where = "levels");
Constellation constellation_from_json(const Json& j, const std::string& where = "constellation");
MappingParams mapping_from_json(const Json& j, const std::string& where = "params");
AffineDecoder decoder_from_json(const Json& j, const std::string& where = "decoder");
SourceSpec source_from_json(const Json& j, const std::string& where = "source");

/// Reads and parses a JSON file. Throws IoError if unreadable, SchemaError if
/// not valid JSON.
Json read_json_file(const std::string& path);
/// Pretty-printed, newline-terminated. Throws IoError.
void write_json_file(const std::string& path, const Json& j);

void save_params(const std::string& path, const MappingParams& params);
MappingParams load_params(const std::string& path);

/// Shared field readers; each throws SchemaError naming `where.key`.
namespace schema {
const Json& field(const Json& obj, const std::string& key, const std::string& where);
double number(const Json& obj, const std::string& key, const std::string& where);
double number_or(const Json& obj, const std::string& key, double fallback, const std::string& where);
std::vector<double> numbers(const Json& obj, const std::string& key, const std::string& where);
std::string string(const Json& obj, const std::string& key, const std::string& where);
void expect_type(const Json& obj, const std::string& type, const std::string& where);
}  // namespace schema

}  // namespace cmap
