#include "edgeflow/util/jsonio.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace edgeflow::util {

namespace {

// SAX handler that builds an ordered_json while tracking object keys per
// nesting level to reject duplicates.
class StrictParser : public nlohmann::detail::json_sax_dom_parser<Json> {
public:
  StrictParser(Json& j, const std::string& origin)
      : nlohmann::detail::json_sax_dom_parser<Json>(j, true), origin_(origin) {}

  bool start_object(std::size_t elements) {
    keys_.emplace_back();
    return nlohmann::detail::json_sax_dom_parser<Json>::start_object(elements);
  }

  bool end_object() {
    keys_.pop_back();
    return nlohmann::detail::json_sax_dom_parser<Json>::end_object();
  }

  bool key(Json::string_t& val) {
    auto& level = keys_.back();
    if (!level.insert(val).second)
      throw ParseError(origin_, "duplicate key '" + val + "'");
    return nlohmann::detail::json_sax_dom_parser<Json>::key(val);
  }

private:
  std::string origin_;
  std::vector<std::set<std::string>> keys_;
};

}  // namespace

Json parse_json_strict(const std::string& text, const std::string& origin) {
  Json result;
  StrictParser sax(result, origin);
  if (!Json::sax_parse(text, &sax))
    throw ParseError(origin, "invalid JSON");
  return result;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json_strict(ss.str(), path);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw NetError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace edgeflow::util
