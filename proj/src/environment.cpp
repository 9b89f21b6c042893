#include "acdl/environment.hpp"

#include <json.hpp>

namespace acdl {

using nlohmann::json;

std::string to_display(const IndexValue& value) {
  if (const auto* n = std::get_if<std::int64_t>(&value)) return std::to_string(*n);
  if (const auto* coord = std::get_if<TimeCoord>(&value)) {
    std::string out;
    for (std::size_t i = 0; i < coord->coords.size(); ++i) {
      if (i > 0) out += '.';
      out += std::to_string(coord->coords[i]);
    }
    return out;
  }
  return std::get<std::string>(value);
}

std::string to_key_text(const IndexValue& value) {
  if (const auto* key = std::get_if<std::string>(&value)) return json(*key).dump();
  return to_display(value);
}

std::string substeps_key(const IndexValue& turn) { return "[" + to_display(turn) + "]"; }

namespace {

bool scalar_value(const json& j, IndexValue& out) {
  if (j.is_number_integer()) {
    out = j.get<std::int64_t>();
    return true;
  }
  if (j.is_string()) {
    out = j.get<std::string>();
    return true;
  }
  if (j.is_boolean()) {
    out = std::string(j.get<bool>() ? "true" : "false");
    return true;
  }
  return false;
}

json index_json(const IndexValue& value) {
  if (const auto* n = std::get_if<std::int64_t>(&value)) return *n;
  if (const auto* coord = std::get_if<TimeCoord>(&value)) return to_display(*coord);
  return std::get<std::string>(value);
}

}  // namespace

EnvironmentLoadResult load_environment(std::string_view json_text) {
  EnvironmentLoadResult result;
  auto fail = [&](const std::string& message) {
    result.diagnostics.push_back(make_error("E-ENV", message, {0, 0}));
    return result;
  };
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return fail("environment must be a JSON object");
  EnvironmentDocument& env = result.environment;

  if (doc.contains("time")) {
    const json& time = doc["time"];
    if (time.is_number_integer()) {
      env.time.push_back(time.get<std::int64_t>());
    } else if (time.is_array()) {
      for (const json& c : time) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
          return fail("'time' must list non-negative integers");
        }
        env.time.push_back(c.get<std::int64_t>());
      }
    } else {
      return fail("'time' must be an integer or an array of integers");
    }
  }
  if (doc.contains("vars")) {
    if (!doc["vars"].is_object()) return fail("'vars' must be an object");
    for (const auto& [key, value] : doc["vars"].items()) {
      IndexValue v;
      if (!scalar_value(value, v)) return fail("variable '" + key + "' must be a string, integer or boolean");
      env.vars.emplace(key, std::move(v));
    }
  }
  if (doc.contains("collections")) {
    if (!doc["collections"].is_object()) return fail("'collections' must be an object");
    for (const auto& [key, value] : doc["collections"].items()) {
      if (!value.is_array()) return fail("collection '" + key + "' must be an array");
      std::vector<IndexValue> items;
      for (const json& element : value) {
        IndexValue v;
        if (!scalar_value(element, v)) return fail("collection '" + key + "' holds a non-scalar element");
        items.push_back(std::move(v));
      }
      env.collections.emplace(key, std::move(items));
    }
  }
  if (doc.contains("substeps")) {
    if (!doc["substeps"].is_object()) return fail("'substeps' must be an object");
    for (const auto& [key, value] : doc["substeps"].items()) {
      if (!value.is_number_integer()) return fail("substep count '" + key + "' must be an integer");
      env.substeps.emplace(key, value.get<std::int64_t>());
    }
  }
  if (doc.contains("conditions")) {
    if (!doc["conditions"].is_object()) return fail("'conditions' must be an object");
    for (const auto& [key, value] : doc["conditions"].items()) {
      if (!value.is_boolean()) return fail("condition '" + key + "' must be a boolean");
      env.conditions.emplace(key, value.get<bool>());
    }
  }
  if (doc.contains("functions")) {
    if (!doc["functions"].is_object()) return fail("'functions' must be an object");
    for (const auto& [key, value] : doc["functions"].items()) env.functions.emplace(key, value.dump());
  }
  return result;
}

std::string environment_to_json(const EnvironmentDocument& env) {
  json doc = json::object();
  doc["time"] = env.time;
  json vars = json::object();
  for (const auto& [key, value] : env.vars) vars[key] = index_json(value);
  doc["vars"] = std::move(vars);
  json collections = json::object();
  for (const auto& [key, items] : env.collections) {
    json arr = json::array();
    for (const IndexValue& v : items) arr.push_back(index_json(v));
    collections[key] = std::move(arr);
  }
  doc["collections"] = std::move(collections);
  doc["substeps"] = env.substeps;
  doc["conditions"] = env.conditions;
  json functions = json::object();
  for (const auto& [key, text] : env.functions) functions[key] = json::parse(text, nullptr, false);
  doc["functions"] = std::move(functions);
  return doc.dump();
}

}  // namespace acdl
