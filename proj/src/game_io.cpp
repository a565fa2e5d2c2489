#include "cursedsig/game_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cursedsig {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

// Converts a byte offset from a json parse error into line:column.
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_or_throw(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": parse error at " + locate(text, e.byte) + ": " + e.what());
  }
}

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& message) {
  throw InputError(origin + ": " + path + ": " + message);
}

double number_at(const json& j, const std::string& origin, const std::string& path) {
  if (!j.is_number()) fail(origin, path, "expected a number");
  return j.get<double>();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& origin, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(origin, path, "unknown field '" + it.key() + "'");
}

std::vector<std::string> string_list(const json& j, const std::string& origin,
                                     const std::string& path) {
  if (!j.is_array() || j.empty()) fail(origin, path, "expected a nonempty array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) fail(origin, path, "expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

GameFile parse_game_json(const std::string& text, const std::string& origin) {
  const json doc = parse_or_throw(text, origin);
  if (!doc.is_object()) fail(origin, "$", "top level must be an object");
  reject_unknown_keys(doc,
                      {"types", "messages", "receiver_mode", "actions", "sender_payoff",
                       "receiver_payoff", "sender_cost", "support_specs"},
                      origin, "$");

  GameFile out;
  SignalingGame& g = out.game;

  if (!doc.contains("types") || !doc["types"].is_array() || doc["types"].empty())
    fail(origin, "$.types", "expected a nonempty array");
  std::vector<double> prior;
  std::vector<double> productivity;
  bool any_productivity = false;
  for (std::size_t i = 0; i < doc["types"].size(); ++i) {
    const json& t = doc["types"][i];
    const std::string path = "$.types[" + std::to_string(i) + "]";
    if (!t.is_object()) fail(origin, path, "expected an object");
    reject_unknown_keys(t, {"id", "prior", "productivity"}, origin, path);
    if (!t.contains("id") || !t["id"].is_string()) fail(origin, path, "missing string 'id'");
    if (!t.contains("prior")) fail(origin, path, "missing 'prior'");
    g.types.push_back(t["id"].get<std::string>());
    prior.push_back(number_at(t["prior"], origin, path + ".prior"));
    if (t.contains("productivity")) {
      any_productivity = true;
      productivity.push_back(number_at(t["productivity"], origin, path + ".productivity"));
    } else {
      productivity.push_back(0.0);
    }
  }
  g.prior.weights = Eigen::Map<Vector>(prior.data(), static_cast<long>(prior.size()));
  try {
    g.prior = PriorDistribution::from(g.prior.weights);
  } catch (const InputError& e) {
    fail(origin, "$.types[*].prior", e.what());
  }

  if (!doc.contains("messages")) fail(origin, "$.messages", "missing");
  g.messages = string_list(doc["messages"], origin, "$.messages");

  if (!doc.contains("receiver_mode") || !doc["receiver_mode"].is_string())
    fail(origin, "$.receiver_mode", "expected \"finite\" or \"wage_quadratic\"");
  const std::string mode = doc["receiver_mode"].get<std::string>();
  if (mode == "finite")
    g.mode = ReceiverMode::FiniteActions;
  else if (mode == "wage_quadratic")
    g.mode = ReceiverMode::WageQuadratic;
  else
    fail(origin, "$.receiver_mode", "expected \"finite\" or \"wage_quadratic\"");

  const int n_types = g.num_types();
  const int n_msgs = g.num_messages();

  // Optional per-(type, message) signaling cost, used directly in wage mode
  // and folded into sender payoffs in finite mode.
  Matrix cost = Matrix::Zero(n_types, n_msgs);
  if (doc.contains("sender_cost")) {
    const json& sc = doc["sender_cost"];
    if (!sc.is_object()) fail(origin, "$.sender_cost", "expected an object keyed by type");
    for (auto it = sc.begin(); it != sc.end(); ++it) {
      const int t = [&] {
        try {
          return g.type_index(it.key());
        } catch (const InputError&) {
          fail(origin, "$.sender_cost", "unknown type id '" + it.key() + "'");
        }
      }();
      if (!it.value().is_object())
        fail(origin, "$.sender_cost." + it.key(), "expected an object keyed by message");
      for (auto mt = it.value().begin(); mt != it.value().end(); ++mt) {
        const int m = [&] {
          try {
            return g.message_index(mt.key());
          } catch (const InputError&) {
            fail(origin, "$.sender_cost." + it.key(), "unknown message id '" + mt.key() + "'");
          }
        }();
        cost(t, m) = number_at(mt.value(), origin, "$.sender_cost." + it.key() + "." + mt.key());
      }
    }
  }

  if (g.mode == ReceiverMode::WageQuadratic) {
    for (const char* key : {"actions", "sender_payoff", "receiver_payoff"})
      if (doc.contains(key))
        fail(origin, std::string("$.") + key, "not allowed in wage_quadratic mode");
    if (!any_productivity)
      fail(origin, "$.types", "wage_quadratic mode needs a productivity per type");
    g.productivity = Eigen::Map<Vector>(productivity.data(), n_types);
    g.sender_cost = cost;
  } else {
    if (any_productivity)
      fail(origin, "$.types", "productivity is only meaningful in wage_quadratic mode");
    if (!doc.contains("actions")) fail(origin, "$.actions", "missing");
    g.actions = string_list(doc["actions"], origin, "$.actions");
    const int n_actions = g.num_actions();

    auto read_table = [&](const char* key) {
      if (!doc.contains(key)) fail(origin, std::string("$.") + key, "missing");
      const json& tab = doc[key];
      if (!tab.is_object()) fail(origin, std::string("$.") + key, "expected an object");
      std::vector<Matrix> out_tab(n_types, Matrix::Zero(n_msgs, n_actions));
      std::vector<std::vector<bool>> seen(n_types, std::vector<bool>(n_msgs, false));
      for (auto tt = tab.begin(); tt != tab.end(); ++tt) {
        const std::string tpath = std::string("$.") + key + "." + tt.key();
        const int t = [&] {
          try {
            return g.type_index(tt.key());
          } catch (const InputError&) {
            fail(origin, std::string("$.") + key, "unknown type id '" + tt.key() + "'");
          }
        }();
        if (!tt.value().is_object()) fail(origin, tpath, "expected an object keyed by message");
        for (auto mm = tt.value().begin(); mm != tt.value().end(); ++mm) {
          const std::string mpath = tpath + "." + mm.key();
          const int m = [&] {
            try {
              return g.message_index(mm.key());
            } catch (const InputError&) {
              fail(origin, tpath, "unknown message id '" + mm.key() + "'");
            }
          }();
          if (!mm.value().is_object()) fail(origin, mpath, "expected an object keyed by action");
          for (auto aa = mm.value().begin(); aa != mm.value().end(); ++aa) {
            const int a = [&] {
              try {
                return g.action_index(aa.key());
              } catch (const InputError&) {
                fail(origin, mpath, "unknown action id '" + aa.key() + "'");
              }
            }();
            out_tab[t](m, a) = number_at(aa.value(), origin, mpath + "." + aa.key());
          }
          seen[t][m] = true;
        }
      }
      for (int t = 0; t < n_types; ++t)
        for (int m = 0; m < n_msgs; ++m)
          if (!seen[t][m])
            fail(origin, std::string("$.") + key,
                 "missing entry for type '" + g.types[t] + "', message '" + g.messages[m] + "'");
      return out_tab;
    };

    g.sender_payoff = read_table("sender_payoff");
    g.receiver_payoff = read_table("receiver_payoff");
    for (int t = 0; t < n_types; ++t)
      g.sender_payoff[t].colwise() -= cost.row(t).transpose();
  }

  g.validate();

  if (doc.contains("support_specs")) {
    const json& specs = doc["support_specs"];
    if (!specs.is_array()) fail(origin, "$.support_specs", "expected an array");
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const std::string path = "$.support_specs[" + std::to_string(i) + "]";
      const json& s = specs[i];
      if (!s.is_object()) fail(origin, path, "expected an object");
      reject_unknown_keys(s, {"name", "sender", "receiver"}, origin, path);
      SupportSpec spec;
      spec.name = s.contains("name") ? s["name"].get<std::string>() : ("spec" + std::to_string(i));
      spec.sender.assign(n_types, {});
      spec.receiver.assign(n_msgs, {});
      if (!s.contains("sender") || !s["sender"].is_object())
        fail(origin, path, "missing 'sender' support object");
      for (auto it = s["sender"].begin(); it != s["sender"].end(); ++it) {
        const int t = g.type_index(it.key());
        for (const std::string& mid : string_list(it.value(), origin, path + ".sender." + it.key()))
          spec.sender[t].push_back(g.message_index(mid));
      }
      for (int t = 0; t < n_types; ++t)
        if (spec.sender[t].empty())
          fail(origin, path + ".sender", "type '" + g.types[t] + "' needs a nonempty support");
      if (s.contains("receiver")) {
        if (g.mode == ReceiverMode::WageQuadratic)
          fail(origin, path + ".receiver", "not allowed in wage_quadratic mode");
        for (auto it = s["receiver"].begin(); it != s["receiver"].end(); ++it) {
          const int m = g.message_index(it.key());
          for (const std::string& aid :
               string_list(it.value(), origin, path + ".receiver." + it.key()))
            spec.receiver[m].push_back(g.action_index(aid));
        }
      }
      out.support_specs.push_back(std::move(spec));
    }
  }

  return out;
}

GameFile load_game_file(const std::string& path) {
  return parse_game_json(read_text_file(path), path);
}

Assessment parse_assessment_json(const std::string& text, const std::string& origin,
                                 const SignalingGame& game) {
  const json doc = parse_or_throw(text, origin);
  if (!doc.is_object()) fail(origin, "$", "top level must be an object");
  reject_unknown_keys(doc, {"chi", "sender", "receiver", "beliefs"}, origin, "$");
  for (const char* key : {"chi", "sender", "receiver", "beliefs"})
    if (!doc.contains(key)) fail(origin, std::string("$.") + key, "missing");

  Assessment a;
  a.chi = number_at(doc["chi"], origin, "$.chi");
  require_chi(a.chi);

  const int n_types = game.num_types();
  const int n_msgs = game.num_messages();

  a.sender = Matrix::Zero(n_types, n_msgs);
  for (auto it = doc["sender"].begin(); it != doc["sender"].end(); ++it) {
    const int t = game.type_index(it.key());
    for (auto mt = it.value().begin(); mt != it.value().end(); ++mt)
      a.sender(t, game.message_index(mt.key())) =
          number_at(mt.value(), origin, "$.sender." + it.key() + "." + mt.key());
  }

  a.beliefs = Matrix::Zero(n_msgs, n_types);
  for (auto it = doc["beliefs"].begin(); it != doc["beliefs"].end(); ++it) {
    const int m = game.message_index(it.key());
    for (auto tt = it.value().begin(); tt != it.value().end(); ++tt)
      a.beliefs(m, game.type_index(tt.key())) =
          number_at(tt.value(), origin, "$.beliefs." + it.key() + "." + tt.key());
  }

  if (game.mode == ReceiverMode::WageQuadratic) {
    a.receiver.wages = Vector::Zero(n_msgs);
    for (auto it = doc["receiver"].begin(); it != doc["receiver"].end(); ++it)
      a.receiver.wages(game.message_index(it.key())) =
          number_at(it.value(), origin, "$.receiver." + it.key());
  } else {
    a.receiver.action_probs = Matrix::Zero(n_msgs, game.num_actions());
    for (auto it = doc["receiver"].begin(); it != doc["receiver"].end(); ++it) {
      const int m = game.message_index(it.key());
      if (!it.value().is_object())
        fail(origin, "$.receiver." + it.key(), "expected an object keyed by action");
      for (auto at = it.value().begin(); at != it.value().end(); ++at)
        a.receiver.action_probs(m, game.action_index(at.key())) =
            number_at(at.value(), origin, "$.receiver." + it.key() + "." + at.key());
    }
  }
  return a;
}

Assessment load_assessment(const std::string& path, const SignalingGame& game) {
  return parse_assessment_json(read_text_file(path), path, game);
}

}  // namespace cursedsig
