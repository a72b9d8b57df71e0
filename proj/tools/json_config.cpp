#include "json_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "cirm/errors.hpp"
#include "json.hpp"

namespace cirm::cli {

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

}  // namespace

std::vector<std::string> expand_config(std::vector<std::string> args) {
  const auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw ParseError("--config requires a file name");
  const std::string path = *(it + 1);
  const auto at = it - args.begin();
  args.erase(it, it + 2);

  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ParseError("config file " + path + " must hold a JSON object");

  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
  }
  std::vector<std::string> inserted;
  for (auto item = j.begin(); item != j.end(); ++item) {
    const std::string flag = flag_name(item.key());
    if (given.count(flag)) continue;
    const auto& v = item.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) inserted.push_back(flag);
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) joined += (joined.empty() ? "" : ",") + scalar_text(e);
      inserted.push_back(flag);
      inserted.push_back(joined);
    } else if (!v.is_null()) {
      inserted.push_back(flag);
      inserted.push_back(scalar_text(v));
    }
  }
  args.insert(args.begin() + at, inserted.begin(), inserted.end());
  return args;
}

}  // namespace cirm::cli
