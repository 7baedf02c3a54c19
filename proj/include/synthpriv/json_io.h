// Copyright 2026 The SynthPriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// JSON conversions for schemas and component configs. Readers throw
// kConfigError with a JSON-pointer-like path to the offending field.

#ifndef SYNTHPRIV_JSON_IO_H_
#define SYNTHPRIV_JSON_IO_H_

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthpriv/error.h"
#include "synthpriv/generator.h"
#include "synthpriv/random_forest.h"
#include "synthpriv/sanitiser.h"
#include "synthpriv/schema.h"
#include "synthpriv/toy_population.h"

namespace synthpriv {

using Json = nlohmann::ordered_json;

// Field readers shared by the config parsers. All throw kConfigError.
namespace json {

[[noreturn]] void Fail(const std::string& path, const std::string& message);
std::string Child(const std::string& path, const std::string& key);
std::string Child(const std::string& path, std::size_t index);
void RequireObject(const Json& j, const std::string& path);
// Rejects keys outside `allowed`.
void CheckKeys(const Json& j, const std::string& path,
               std::initializer_list<const char*> allowed);
const Json& Require(const Json& j, const std::string& key,
                    const std::string& path);
double AsNumber(const Json& v, const std::string& path);
long long AsInteger(const Json& v, const std::string& path);
std::size_t AsCount(const Json& v, const std::string& path);
std::string AsString(const Json& v, const std::string& path);
bool AsBool(const Json& v, const std::string& path);
std::vector<std::string> AsStringList(const Json& v, const std::string& path);
std::vector<double> AsNumberList(const Json& v, const std::string& path);

template <typename T, typename Convert>
void Optional(const Json& j, const std::string& key, const std::string& path,
              T& target, Convert convert) {
  auto it = j.find(key);
  if (it != j.end()) target = convert(*it, Child(path, key));
}

// Library validation errors become config errors located at `path`.
template <typename F>
void Revalidate(const std::string& path, F&& validate) {
  try {
    validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    Fail(path, e.what());
  }
}

}  // namespace json

// Reads a whole file as JSON. Throws kIoError or kParseError.
Json LoadJsonFile(const std::filesystem::path& path);
// Writes `value` with two-space indentation and a trailing newline.
void SaveJsonFile(const std::filesystem::path& path, const Json& value);

Json AttributeToJson(const AttributeSpec& spec);
AttributeSpec AttributeFromJson(const Json& j, const std::string& path);

// {"attributes": [...], "quasi_identifiers": [...]}
Json SchemaToJson(const SchemaMetadata& schema);
SchemaMetadata SchemaFromJson(const Json& j, const std::string& path = "");
SchemaMetadata LoadSchemaFile(const std::filesystem::path& path);
void SaveSchemaFile(const std::filesystem::path& path,
                    const SchemaMetadata& schema);

Json GeneratorSpecToJson(const GeneratorSpec& spec);
GeneratorSpec GeneratorSpecFromJson(const Json& j, const std::string& path);

Json SanitiserConfigToJson(const SanitiserConfig& config);
SanitiserConfig SanitiserConfigFromJson(const Json& j, const std::string& path);

Json ForestParamsToJson(const ForestParams& params);
ForestParams ForestParamsFromJson(const Json& j, const std::string& path);

ToyPopulationConfig ToyPopulationFromJson(const Json& j,
                                          const std::string& path);

}  // namespace synthpriv

#endif  // SYNTHPRIV_JSON_IO_H_
