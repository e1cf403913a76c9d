#include "edgeflow/flow/parse.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "edgeflow/util/duration.hpp"

namespace edgeflow::flow {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ParseError(origin, msg);
}

ChoiceOp choice_op_from_string(const std::string& s, const std::string& origin) {
  if (s == "lt" || s == "<") return ChoiceOp::Lt;
  if (s == "le" || s == "<=") return ChoiceOp::Le;
  if (s == "eq" || s == "==") return ChoiceOp::Eq;
  if (s == "ge" || s == ">=") return ChoiceOp::Ge;
  if (s == "gt" || s == ">") return ChoiceOp::Gt;
  fail(origin, "unknown choice operator '" + s + "'");
}

// Every "$input." occurrence must be followed by a non-empty key of
// [A-Za-z0-9_] characters.
void check_template_string(const std::string& s, const std::string& origin,
                           const std::string& state, std::set<std::string>* keys) {
  size_t pos = 0;
  while ((pos = s.find("$input.", pos)) != std::string::npos) {
    size_t key_start = pos + 7;
    size_t key_end = key_start;
    while (key_end < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[key_end])) || s[key_end] == '_'))
      ++key_end;
    if (key_end == key_start)
      fail(origin, "state '" + state + "': malformed template reference in \"" + s + "\"");
    if (keys) keys->insert(s.substr(key_start, key_end - key_start));
    pos = key_end;
  }
  // A bare "$input" with no dot is almost certainly a typo.
  pos = s.find("$input");
  if (pos != std::string::npos && (pos + 6 == s.size() || s[pos + 6] != '.'))
    fail(origin, "state '" + state + "': malformed template reference in \"" + s + "\"");
}

void walk_template(const Json& node, const std::string& origin, const std::string& state,
                   std::set<std::string>* keys) {
  if (node.is_string()) {
    check_template_string(node.get<std::string>(), origin, state, keys);
  } else if (node.is_object() || node.is_array()) {
    for (const auto& child : node) walk_template(child, origin, state, keys);
  }
}

}  // namespace

FlowDefinition parse_flow_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_flow(ss.str(), path);
}

FlowDefinition parse_flow(const std::string& text, const std::string& origin) {
  Json doc;
  try {
    doc = util::parse_json_strict(text, origin);
  } catch (const Json::parse_error& e) {
    fail(origin, e.what());
  }
  return parse_flow_json(doc, origin);
}

FlowDefinition parse_flow_json(const Json& doc, const std::string& origin) {
  if (!doc.is_object()) fail(origin, "flow definition must be a JSON object");
  FlowDefinition flow;
  flow.source = doc;
  if (!doc.contains("flow_id") || !doc["flow_id"].is_string())
    fail(origin, "missing string field 'flow_id'");
  flow.flow_id = doc["flow_id"];
  if (!doc.contains("start") || !doc["start"].is_string())
    fail(origin, "missing string field 'start'");
  flow.start = doc["start"];
  if (!doc.contains("states") || !doc["states"].is_object() || doc["states"].empty())
    fail(origin, "missing non-empty object field 'states'");

  for (auto it = doc["states"].begin(); it != doc["states"].end(); ++it) {
    const std::string& name = it.key();
    const Json& s = it.value();
    if (!s.is_object()) fail(origin, "state '" + name + "' must be an object");
    ActionSpec spec;
    spec.name = name;
    if (!s.contains("kind") || !s["kind"].is_string())
      fail(origin, "state '" + name + "' missing 'kind'");
    try {
      spec.kind = action_kind_from_string(s["kind"]);
    } catch (const ParseError& e) {
      fail(origin, "state '" + name + "': " + e.what());
    }
    spec.provider = s.value("provider", "");
    spec.params = s.value("params", Json::object());
    spec.next = s.value("next", "");
    spec.on_failure = s.value("on_failure", "");
    spec.phase = s.value("phase", "");
    spec.max_retries = s.value("max_retries", 3);
    if (spec.max_retries < 1)
      fail(origin, "state '" + name + "': max_retries must be >= 1");
    if (s.contains("retry_backoff")) {
      try {
        spec.retry_backoff_ns = util::parse_duration_ns(s["retry_backoff"].get<std::string>());
      } catch (const std::exception& e) {
        fail(origin, "state '" + name + "': " + e.what());
      }
    }

    if (is_terminal(spec.kind)) {
      if (!spec.next.empty() || !spec.on_failure.empty())
        fail(origin, "terminal state '" + name + "' cannot have outgoing edges");
    } else if (spec.kind == ActionKind::Choice) {
      const Json& p = spec.params;
      ChoiceSpec c;
      if (!p.contains("left") || !p["left"].is_string())
        fail(origin, "choice state '" + name + "' needs a string 'params.left'");
      std::string left = p["left"];
      // "$output.<state>.<field>"
      const std::string prefix = "$output.";
      if (left.rfind(prefix, 0) != 0)
        fail(origin, "choice state '" + name + "': left must be '$output.<state>.<field>'");
      size_t dot = left.find('.', prefix.size());
      if (dot == std::string::npos || dot == prefix.size() || dot + 1 >= left.size())
        fail(origin, "choice state '" + name + "': left must be '$output.<state>.<field>'");
      c.source_state = left.substr(prefix.size(), dot - prefix.size());
      c.field = left.substr(dot + 1);
      if (!p.contains("op") || !p["op"].is_string())
        fail(origin, "choice state '" + name + "' needs 'params.op'");
      c.op = choice_op_from_string(p["op"], origin);
      if (!p.contains("right") || !p["right"].is_number())
        fail(origin, "choice state '" + name + "' needs numeric 'params.right'");
      c.literal = p["right"].get<double>();
      if (spec.next.empty() || !s.contains("else") || !s["else"].is_string())
        fail(origin, "choice state '" + name + "' needs both 'next' and 'else' targets");
      c.if_true = spec.next;
      c.if_false = s["else"];
      spec.choice = c;
    } else {
      if (spec.next.empty())
        fail(origin, "state '" + name + "' has no 'next' target");
    }
    flow.states.push_back(std::move(spec));
  }

  if (!flow.find(flow.start))
    fail(origin, "start state '" + flow.start + "' is not defined");

  // Validate exactly the subgraph reachable from start: existing targets,
  // acyclicity, well-formed templates.
  std::set<std::string> visiting, done;
  std::function<void(const std::string&, const std::string&)> visit =
      [&](const std::string& name, const std::string& from) {
        const ActionSpec* spec = flow.find(name);
        if (!spec)
          fail(origin, "state '" + from + "' targets missing state '" + name + "'");
        if (visiting.count(name))
          fail(origin, "cycle through state '" + name + "'");
        if (done.count(name)) return;
        visiting.insert(name);
        walk_template(spec->params, origin, name, nullptr);
        if (spec->choice) {
          if (!flow.find(spec->choice->source_state))
            fail(origin, "choice state '" + name + "' reads output of unknown state '" +
                             spec->choice->source_state + "'");
          visit(spec->choice->if_true, name);
          visit(spec->choice->if_false, name);
        } else if (!is_terminal(spec->kind)) {
          visit(spec->next, name);
          if (!spec->on_failure.empty()) visit(spec->on_failure, name);
        }
        visiting.erase(name);
        done.insert(name);
      };
  visit(flow.start, "<start>");

  return flow;
}

Json render_params(const Json& params, const Json& input) {
  std::function<Json(const Json&)> render = [&](const Json& node) -> Json {
    if (node.is_string()) {
      std::string s = node.get<std::string>();
      // Whole-value reference keeps the input value's JSON type.
      if (s.rfind("$input.", 0) == 0 && s.find_first_of(" \t") == std::string::npos) {
        std::string key = s.substr(7);
        if (!key.empty() &&
            std::all_of(key.begin(), key.end(),
                        [](unsigned char c) { return std::isalnum(c) || c == '_'; })) {
          if (!input.contains(key))
            throw ParameterError("input is missing key '" + key + "'");
          return input[key];
        }
      }
      // Embedded references are replaced textually.
      std::string out;
      size_t pos = 0;
      while (true) {
        size_t hit = s.find("$input.", pos);
        if (hit == std::string::npos) {
          out += s.substr(pos);
          break;
        }
        out += s.substr(pos, hit - pos);
        size_t key_start = hit + 7;
        size_t key_end = key_start;
        while (key_end < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[key_end])) || s[key_end] == '_'))
          ++key_end;
        std::string key = s.substr(key_start, key_end - key_start);
        if (!input.contains(key))
          throw ParameterError("input is missing key '" + key + "'");
        const Json& v = input[key];
        out += v.is_string() ? v.get<std::string>() : v.dump();
        pos = key_end;
      }
      return out;
    }
    if (node.is_object()) {
      Json obj = Json::object();
      for (auto it = node.begin(); it != node.end(); ++it) obj[it.key()] = render(it.value());
      return obj;
    }
    if (node.is_array()) {
      Json arr = Json::array();
      for (const auto& child : node) arr.push_back(render(child));
      return arr;
    }
    return node;
  };
  return render(params);
}

}  // namespace edgeflow::flow
