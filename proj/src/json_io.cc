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

#include "synthpriv/json_io.h"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <utility>

#include "synthpriv/error.h"

namespace synthpriv {
namespace json {

void Fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kConfigError,
              (path.empty() ? std::string("/") : path) + ": " + message);
}

std::string Child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

std::string Child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

void RequireObject(const Json& j, const std::string& path) {
  if (!j.is_object()) Fail(path, "expected an object");
}

void CheckKeys(const Json& j, const std::string& path,
               std::initializer_list<const char*> allowed) {
  RequireObject(j, path);
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) Fail(Child(path, key), "unknown field");
  }
}

const Json& Require(const Json& j, const std::string& key,
                    const std::string& path) {
  RequireObject(j, path);
  auto it = j.find(key);
  if (it == j.end()) Fail(Child(path, key), "missing required field");
  return *it;
}

double AsNumber(const Json& v, const std::string& path) {
  if (!v.is_number()) Fail(path, "expected a number");
  return v.get<double>();
}

long long AsInteger(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) Fail(path, "expected an integer");
  return v.get<long long>();
}

std::size_t AsCount(const Json& v, const std::string& path) {
  const long long x = AsInteger(v, path);
  if (x < 0) Fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

std::string AsString(const Json& v, const std::string& path) {
  if (!v.is_string()) Fail(path, "expected a string");
  return v.get<std::string>();
}

bool AsBool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) Fail(path, "expected true or false");
  return v.get<bool>();
}

std::vector<std::string> AsStringList(const Json& v, const std::string& path) {
  if (!v.is_array()) Fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(AsString(v[i], Child(path, i)));
  }
  return out;
}

std::vector<double> AsNumberList(const Json& v, const std::string& path) {
  if (!v.is_array()) Fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(AsNumber(v[i], Child(path, i)));
  }
  return out;
}

}  // namespace json

using namespace json;  // NOLINT

Json LoadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void SaveJsonFile(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  }
  out << value.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
  }
}

Json AttributeToJson(const AttributeSpec& spec) {
  Json j;
  j["name"] = spec.name;
  if (spec.is_categorical()) {
    j["kind"] = "categorical";
    j["categories"] = spec.categories;
  } else {
    j["kind"] = "continuous";
    j["min"] = spec.min;
    j["max"] = spec.max;
    j["bins"] = spec.bins;
  }
  return j;
}

AttributeSpec AttributeFromJson(const Json& j, const std::string& path) {
  RequireObject(j, path);
  const std::string name = AsString(Require(j, "name", path), Child(path, "name"));
  const std::string kind = AsString(Require(j, "kind", path), Child(path, "kind"));
  AttributeSpec spec;
  if (kind == "categorical") {
    spec = AttributeSpec::Categorical(
        name, AsStringList(Require(j, "categories", path),
                           Child(path, "categories")));
  } else if (kind == "continuous") {
    int bins = 1;
    Optional(j, "bins", path, bins, [](const Json& v, const std::string& p) {
      return static_cast<int>(AsInteger(v, p));
    });
    spec = AttributeSpec::Continuous(
        name, AsNumber(Require(j, "min", path), Child(path, "min")),
        AsNumber(Require(j, "max", path), Child(path, "max")), bins);
  } else {
    Fail(Child(path, "kind"), "expected \"categorical\" or \"continuous\"");
  }
  Revalidate(path, [&] { spec.Validate(); });
  return spec;
}

Json SchemaToJson(const SchemaMetadata& schema) {
  Json j;
  j["attributes"] = Json::array();
  for (const auto& a : schema.attributes()) {
    j["attributes"].push_back(AttributeToJson(a));
  }
  j["quasi_identifiers"] = schema.quasi_identifiers();
  return j;
}

SchemaMetadata SchemaFromJson(const Json& j, const std::string& path) {
  CheckKeys(j, path, {"attributes", "quasi_identifiers"});
  const std::string attr_path = Child(path, "attributes");
  const Json& attrs = Require(j, "attributes", path);
  if (!attrs.is_array()) Fail(attr_path, "expected an array");
  std::vector<AttributeSpec> specs;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    CheckKeys(attrs[i], Child(attr_path, i),
              {"name", "kind", "categories", "min", "max", "bins"});
    specs.push_back(AttributeFromJson(attrs[i], Child(attr_path, i)));
  }
  std::vector<std::string> qis;
  Optional(j, "quasi_identifiers", path, qis, AsStringList);
  SchemaMetadata schema;
  Revalidate(path, [&] { schema = SchemaMetadata(std::move(specs), qis); });
  return schema;
}

SchemaMetadata LoadSchemaFile(const std::filesystem::path& path) {
  return SchemaFromJson(LoadJsonFile(path), "");
}

void SaveSchemaFile(const std::filesystem::path& path,
                    const SchemaMetadata& schema) {
  SaveJsonFile(path, SchemaToJson(schema));
}

Json GeneratorSpecToJson(const GeneratorSpec& spec) {
  Json j;
  switch (spec.kind) {
    case GeneratorKind::kIndHist: j["kind"] = "indhist"; break;
    case GeneratorKind::kBayNet: j["kind"] = "baynet"; break;
    case GeneratorKind::kPrivBay: j["kind"] = "privbay"; break;
    case GeneratorKind::kExternal: j["kind"] = "external"; break;
  }
  j["nbins"] = spec.nbins;
  j["degree"] = spec.degree;
  if (spec.budget) {
    j["epsilon"] = spec.budget->epsilon_total;
    j["structure_fraction"] = spec.budget->structure_fraction;
  }
  j["metadata"] =
      spec.metadata_mode == MetadataMode::kProvided ? "provided" : "learned";
  j["learned_pad_fraction"] = spec.learned_pad_fraction;
  if (spec.mi_sensitivity) j["mi_sensitivity"] = *spec.mi_sensitivity;
  if (spec.kind == GeneratorKind::kExternal) j["command"] = spec.external_cmd;
  j["keep_workdirs"] = spec.keep_workdirs;
  return j;
}

GeneratorSpec GeneratorSpecFromJson(const Json& j, const std::string& path) {
  CheckKeys(j, path,
            {"kind", "nbins", "degree", "epsilon", "structure_fraction",
             "metadata", "learned_pad_fraction", "mi_sensitivity", "command",
             "keep_workdirs"});
  GeneratorSpec spec;
  const std::string kind =
      AsString(Require(j, "kind", path), Child(path, "kind"));
  if (kind == "indhist") {
    spec.kind = GeneratorKind::kIndHist;
  } else if (kind == "baynet") {
    spec.kind = GeneratorKind::kBayNet;
  } else if (kind == "privbay") {
    spec.kind = GeneratorKind::kPrivBay;
  } else if (kind == "external") {
    spec.kind = GeneratorKind::kExternal;
  } else {
    Fail(Child(path, "kind"),
         "expected one of indhist, baynet, privbay, external");
  }
  auto as_int = [](const Json& v, const std::string& p) {
    return static_cast<int>(AsInteger(v, p));
  };
  Optional(j, "nbins", path, spec.nbins, as_int);
  Optional(j, "degree", path, spec.degree, as_int);
  if (j.contains("epsilon")) {
    PrivacyBudget budget;
    budget.epsilon_total = AsNumber(j["epsilon"], Child(path, "epsilon"));
    Optional(j, "structure_fraction", path, budget.structure_fraction,
             AsNumber);
    spec.budget = budget;
  } else if (j.contains("structure_fraction")) {
    Fail(Child(path, "structure_fraction"), "given without epsilon");
  }
  if (j.contains("metadata")) {
    const std::string mode =
        AsString(j["metadata"], Child(path, "metadata"));
    if (mode == "provided") {
      spec.metadata_mode = MetadataMode::kProvided;
    } else if (mode == "learned") {
      spec.metadata_mode = MetadataMode::kLearned;
    } else {
      Fail(Child(path, "metadata"), "expected \"provided\" or \"learned\"");
    }
  }
  Optional(j, "learned_pad_fraction", path, spec.learned_pad_fraction,
           AsNumber);
  if (j.contains("mi_sensitivity")) {
    spec.mi_sensitivity =
        AsNumber(j["mi_sensitivity"], Child(path, "mi_sensitivity"));
  }
  Optional(j, "command", path, spec.external_cmd, AsString);
  Optional(j, "keep_workdirs", path, spec.keep_workdirs, AsBool);
  Revalidate(path, [&] { spec.Validate(); });
  return spec;
}

Json SanitiserConfigToJson(const SanitiserConfig& config) {
  Json j;
  j["rare_category_threshold"] = config.rare_category_threshold;
  Json grouping = Json::object();
  for (const auto& [attr, mapping] : config.grouping_map) {
    grouping[attr] = Json::object();
    for (const auto& [from, to] : mapping) grouping[attr][from] = to;
  }
  j["grouping"] = grouping;
  j["quantile_cap"] = config.quantile_cap;
  j["k"] = config.k;
  j["quasi_identifiers"] = config.quasi_identifiers;
  return j;
}

SanitiserConfig SanitiserConfigFromJson(const Json& j,
                                        const std::string& path) {
  CheckKeys(j, path,
            {"rare_category_threshold", "grouping", "quantile_cap", "k",
             "quasi_identifiers"});
  SanitiserConfig config;
  Optional(j, "rare_category_threshold", path, config.rare_category_threshold,
           AsCount);
  if (j.contains("grouping")) {
    const std::string gpath = Child(path, "grouping");
    RequireObject(j["grouping"], gpath);
    for (const auto& [attr, mapping] : j["grouping"].items()) {
      RequireObject(mapping, Child(gpath, attr));
      for (const auto& [from, to] : mapping.items()) {
        config.grouping_map[attr][from] =
            AsString(to, Child(Child(gpath, attr), from));
      }
    }
  }
  Optional(j, "quantile_cap", path, config.quantile_cap, AsNumber);
  Optional(j, "k", path, config.k, AsCount);
  Optional(j, "quasi_identifiers", path, config.quasi_identifiers,
           AsStringList);
  Revalidate(path, [&] { config.Validate(); });
  return config;
}

Json ForestParamsToJson(const ForestParams& params) {
  Json j;
  j["n_trees"] = params.n_trees;
  j["max_features"] = params.max_features;
  j["bootstrap"] = params.bootstrap;
  j["max_depth"] = params.max_depth;
  j["min_leaf"] = params.min_leaf;
  return j;
}

ForestParams ForestParamsFromJson(const Json& j, const std::string& path) {
  CheckKeys(j, path,
            {"n_trees", "max_features", "bootstrap", "max_depth", "min_leaf"});
  ForestParams params;
  auto as_int = [](const Json& v, const std::string& p) {
    return static_cast<int>(AsInteger(v, p));
  };
  Optional(j, "n_trees", path, params.n_trees, as_int);
  Optional(j, "max_features", path, params.max_features, as_int);
  Optional(j, "bootstrap", path, params.bootstrap, AsBool);
  Optional(j, "max_depth", path, params.max_depth, as_int);
  Optional(j, "min_leaf", path, params.min_leaf, as_int);
  Revalidate(path, [&] { params.Validate(); });
  return params;
}

ToyPopulationConfig ToyPopulationFromJson(const Json& j,
                                          const std::string& path) {
  CheckKeys(j, path,
            {"attributes", "quasi_identifiers", "couplings", "planted",
             "outliers"});
  ToyPopulationConfig config;
  const std::string attr_path = Child(path, "attributes");
  const Json& attrs = Require(j, "attributes", path);
  if (!attrs.is_array()) Fail(attr_path, "expected an array");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    const std::string p = Child(attr_path, i);
    CheckKeys(attrs[i], p,
              {"name", "kind", "categories", "min", "max", "bins", "weights",
               "mixture"});
    ToyAttribute attr;
    attr.spec = AttributeFromJson(attrs[i], p);
    if (attr.spec.is_categorical()) {
      if (attrs[i].contains("weights")) {
        attr.weights = AsNumberList(attrs[i]["weights"], Child(p, "weights"));
      } else {
        attr.weights.assign(attr.spec.category_count(), 1.0);
      }
    } else {
      const std::string mpath = Child(p, "mixture");
      const Json& mixture = Require(attrs[i], "mixture", p);
      if (!mixture.is_array()) Fail(mpath, "expected an array");
      for (std::size_t c = 0; c < mixture.size(); ++c) {
        const std::string cp = Child(mpath, c);
        CheckKeys(mixture[c], cp, {"weight", "mean", "sd"});
        MixtureComponent comp;
        Optional(mixture[c], "weight", cp, comp.weight, AsNumber);
        comp.mean = AsNumber(Require(mixture[c], "mean", cp), Child(cp, "mean"));
        comp.sd = AsNumber(Require(mixture[c], "sd", cp), Child(cp, "sd"));
        attr.mixture.push_back(comp);
      }
    }
    config.attributes.push_back(std::move(attr));
  }
  Optional(j, "quasi_identifiers", path, config.quasi_identifiers,
           AsStringList);
  if (j.contains("couplings")) {
    const std::string cpath = Child(path, "couplings");
    if (!j["couplings"].is_array()) Fail(cpath, "expected an array");
    for (std::size_t i = 0; i < j["couplings"].size(); ++i) {
      const Json& c = j["couplings"][i];
      const std::string p = Child(cpath, i);
      CheckKeys(c, p, {"parent", "child", "child_weights", "shifts", "slope"});
      Coupling coupling;
      coupling.parent = AsString(Require(c, "parent", p), Child(p, "parent"));
      coupling.child = AsString(Require(c, "child", p), Child(p, "child"));
      if (c.contains("child_weights")) {
        const std::string wp = Child(p, "child_weights");
        if (!c["child_weights"].is_array()) Fail(wp, "expected an array");
        for (std::size_t r = 0; r < c["child_weights"].size(); ++r) {
          coupling.child_weights.push_back(
              AsNumberList(c["child_weights"][r], Child(wp, r)));
        }
      }
      Optional(c, "shifts", p, coupling.shifts, AsNumberList);
      Optional(c, "slope", p, coupling.slope, AsNumber);
      config.couplings.push_back(std::move(coupling));
    }
  }
  if (j.contains("planted")) {
    const std::string ppath = Child(path, "planted");
    if (!j["planted"].is_array()) Fail(ppath, "expected an array");
    for (std::size_t i = 0; i < j["planted"].size(); ++i) {
      const Json& rec = j["planted"][i];
      const std::string p = Child(ppath, i);
      RequireObject(rec, p);
      PlantedRecord planted;
      for (const auto& [name, value] : rec.items()) {
        if (value.is_string()) {
          planted.values[name] = value.get<std::string>();
        } else {
          planted.values[name] = AsNumber(value, Child(p, name));
        }
      }
      config.planted.push_back(std::move(planted));
    }
  }
  if (j.contains("outliers")) {
    const std::string op = Child(path, "outliers");
    const Json& o = j["outliers"];
    CheckKeys(o, op, {"count", "extreme_attributes", "rare_category"});
    Optional(o, "count", op, config.outliers.count, AsCount);
    Optional(o, "extreme_attributes", op, config.outliers.extreme_attributes,
             AsCount);
    Optional(o, "rare_category", op, config.outliers.rare_category, AsBool);
  }
  Revalidate(path, [&] { config.Validate(); });
  return config;
}

}  // namespace synthpriv
