#include "marll/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "marll/corpus.hpp"
#include "marll/metrics.hpp"

namespace marll {

using nlohmann::json;

json Message::to_json() const {
  json out{{"protocol", protocol}, {"kind", kind}, {"seq", seq}, {"payload", payload}};
  if (!session.empty()) out["session"] = session;
  return out;
}

std::string Message::encode() const { return to_json().dump(); }

Message decode_message(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ProtocolError("message must be a JSON object");
  Message m;
  try {
    if (auto it = doc.find("protocol"); it != doc.end()) m.protocol = it->get<std::string>();
    if (m.protocol != kProtocolVersion) throw ProtocolError("unsupported protocol '" + m.protocol + "'");
    const auto kind = doc.find("kind");
    if (kind == doc.end() || !kind->is_string()) throw ProtocolError("message needs a kind");
    m.kind = kind->get<std::string>();
    if (auto it = doc.find("session"); it != doc.end() && !it->is_null()) m.session = it->get<std::string>();
    if (auto it = doc.find("seq"); it != doc.end()) m.seq = it->get<std::uint64_t>();
    if (auto it = doc.find("payload"); it != doc.end() && !it->is_null()) m.payload = *it;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad message field: ") + e.what());
  }
  if (!m.payload.is_object()) throw ProtocolError("payload must be an object");
  return m;
}

struct SessionHub::Entry {
  std::string graph_ref;
  Graph graph;
  Algorithm algorithm = Algorithm::marl_fr;
  RunConfig config;
  std::uint64_t seed = 0;
  std::optional<Session> session;
  // Classic algorithms run to completion at creation and are played back.
  std::vector<std::pair<std::size_t, Layout>> playback;
  std::size_t cursor = 0;
  ConvergenceReason playback_reason = ConvergenceReason::max_iterations;
  bool paused = false;
  bool done = false;
  std::size_t frame_every = 1;
  std::uint64_t seq = 0;
};

SessionHub::SessionHub() = default;
SessionHub::~SessionHub() = default;
SessionHub::SessionHub(SessionHub&&) noexcept = default;
SessionHub& SessionHub::operator=(SessionHub&&) noexcept = default;

namespace {

class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

NodeId resolve_node(const Graph& g, const json& payload) {
  const auto it = payload.find("node");
  if (it == payload.end()) throw CommandError("payload needs a node");
  if (it->is_number_integer()) {
    const auto v = it->get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= g.node_count()) {
      throw CommandError("unknown node " + std::to_string(v));
    }
    return static_cast<NodeId>(v);
  }
  if (it->is_string()) {
    if (auto v = g.find(it->get<std::string>())) return *v;
    throw CommandError("unknown node '" + it->get<std::string>() + "'");
  }
  throw CommandError("node must be an index or a label");
}

std::size_t positive_count(const json& payload, const char* key, std::size_t fallback) {
  const auto it = payload.find(key);
  if (it == payload.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
    throw CommandError(std::string(key) + " must be a positive integer");
  }
  return static_cast<std::size_t>(it->get<std::int64_t>());
}

Graph graph_from_payload(const json& ref, std::vector<std::optional<Vec2>>& positions) {
  if (ref.is_string()) {
    GraphDocument doc = load_graph(ref.get<std::string>());
    positions = std::move(doc.positions);
    return std::move(doc.graph);
  }
  if (ref.is_object()) {
    GraphDocument doc = parse_json_graph(ref.dump());
    positions = std::move(doc.positions);
    return std::move(doc.graph);
  }
  throw CommandError("graph must be a reference string or a JSON graph");
}

}  // namespace

const Session* SessionHub::find(const std::string& id) const {
  const auto it = sessions_.find(id);
  if (it == sessions_.end() || !it->second->session) return nullptr;
  return &*it->second->session;
}

bool SessionHub::has_running() const {
  for (const auto& [_, e] : sessions_)
    if (!e->paused && !e->done) return true;
  return false;
}

SessionHub::Entry& SessionHub::entry(const std::string& id) {
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw CommandError("unknown session '" + id + "'");
  return *it->second;
}

Message SessionHub::reply(const std::string& kind, const std::string& id, json payload) {
  Message m;
  m.kind = kind;
  m.session = id;
  m.payload = std::move(payload);
  const auto it = sessions_.find(id);
  m.seq = it != sessions_.end() ? ++it->second->seq : ++conn_seq_;
  return m;
}

Message SessionHub::error(const Message& cause, const std::string& what) {
  json payload{{"message", what}, {"in_reply_to", cause.kind}};
  if (cause.seq) payload["request_seq"] = cause.seq;
  return reply("error", sessions_.contains(cause.session) ? cause.session : std::string(), payload);
}

Message SessionHub::frame_of(const std::string& id, Entry& e) {
  const Layout* layout = nullptr;
  json payload;
  if (e.session) {
    const Session& s = *e.session;
    layout = &s.layout();
    payload = s.snapshot();
    payload["t"] = s.iteration();
  } else {
    const auto& [t, l] = e.playback[std::min(e.cursor, e.playback.size() - 1)];
    layout = &l;
    json positions = json::array();
    for (const Vec2& p : l.positions) positions.push_back({p.x, p.y});
    payload = {{"t", t}, {"iteration", t}, {"positions", positions}, {"temperature", nullptr},
               {"A", nullptr}, {"dA", nullptr}, {"dE", nullptr}, {"locked", json::array()}};
  }
  const MetricsReport r = report(*layout, e.graph, e.config.metrics_params());
  payload["metrics"] = {{"nc", r.nc}, {"no", r.no}, {"ne", r.ne}, {"na", r.na},
                        {"crossings", r.crossings}, {"overlaps", r.overlaps}};
  payload["paused"] = e.paused;
  payload["config"] = e.config.to_json();
  return reply("frame", id, payload);
}

std::vector<Message> SessionHub::create(const Message& msg) {
  const json& p = msg.payload;
  auto e = std::make_unique<Entry>();
  std::vector<std::optional<Vec2>> stored;
  if (!p.contains("graph")) throw CommandError("session.create needs a graph");
  e->graph = graph_from_payload(p["graph"], stored);
  e->graph_ref = p["graph"].is_string() ? p["graph"].get<std::string>() : "inline";
  e->algorithm = parse_algorithm(p.value("algorithm", std::string("marl-fr")));
  e->config = RunConfig::from_json(p.value("config", json::object()));
  e->seed = p.value("seed", std::uint64_t{0});
  e->frame_every = positive_count(p, "frame_every", 1);
  e->paused = p.value("paused", false);

  if (is_marl(e->algorithm)) {
    std::optional<Layout> initial;
    const bool all_stored = !stored.empty() && std::all_of(stored.begin(), stored.end(),
                                                           [](const auto& x) { return x.has_value(); });
    if (all_stored) {
      Layout l;
      for (const auto& x : stored) l.positions.push_back(*x);
      initial = std::move(l);
    }
    e->session.emplace(e->graph, e->config.reward_for(e->algorithm), e->config.session_config(), e->seed,
                       std::move(initial));
    if (!all_stored && !stored.empty()) {
      for (NodeId v = 0; v < stored.size(); ++v)
        if (stored[v]) e->session->move_node(v, *stored[v]);
    }
  } else {
    Rng rng(e->seed);
    Layout init = random_layout(e->graph.node_count(), e->config.frame(), rng);
    e->playback.emplace_back(0, init);
    const std::size_t every = e->frame_every;
    auto record = [&](const IterationInfo& info, const Layout& l) {
      if (info.iteration % every == 0) e->playback.emplace_back(info.iteration, l);
    };
    ClassicResult r;
    switch (e->algorithm) {
      case Algorithm::fr: r = fr_layout_from(e->graph, e->config.fr_params(), init, e->seed, record); break;
      case Algorithm::dgc: r = dgc_layout_from(e->graph, e->config.dgc_params(), init, e->seed, record); break;
      default:
        r = stress_majorize_from(e->graph, e->config.stress_params(), all_pairs_hop_distance(e->graph), init,
                                 e->seed, record);
    }
    if (e->playback.back().first != r.iterations) e->playback.emplace_back(r.iterations, r.layout);
    e->playback_reason = r.reason;
  }

  const std::string id = "s" + std::to_string(next_id_++);
  Entry& ref = *e;
  sessions_.emplace(id, std::move(e));

  json labels = json::array();
  for (const auto& l : ref.graph.labels()) labels.push_back(l);
  json edges = json::array();
  for (const Edge& edge : ref.graph.edges()) edges.push_back({edge.u, edge.v});
  json created{{"session", id},
               {"graph", ref.graph_ref},
               {"algorithm", to_string(ref.algorithm)},
               {"seed", ref.seed},
               {"n", ref.graph.node_count()},
               {"m", ref.graph.edge_count()},
               {"labels", labels},
               {"edges", edges},
               {"config", ref.config.to_json()},
               {"frame_every", ref.frame_every},
               {"paused", ref.paused}};
  if (ref.session) created["reward"] = to_json(ref.session->reward());
  if (msg.seq) created["request_seq"] = msg.seq;
  std::vector<Message> out;
  out.push_back(reply("session.created", id, created));
  out.push_back(frame_of(id, ref));
  return out;
}

std::vector<Message> SessionHub::advance(const std::string& id, Entry& e, std::size_t sweeps) {
  std::vector<Message> out;
  for (std::size_t i = 0; i < sweeps && !e.done; ++i) {
    if (e.session) {
      Session& s = *e.session;
      if (auto reason = s.check_convergence()) {
        e.done = true;
        out.push_back(reply("session.done", id, {{"reason", to_string(*reason)}, {"iterations", s.iteration()}}));
        break;
      }
      s.step();
      const auto reason = s.check_convergence();
      if (s.iteration() % e.frame_every == 0 || reason) out.push_back(frame_of(id, e));
      if (reason) {
        e.done = true;
        out.push_back(reply("session.done", id, {{"reason", to_string(*reason)}, {"iterations", s.iteration()}}));
      }
    } else {
      if (e.cursor + 1 < e.playback.size()) {
        ++e.cursor;
        out.push_back(frame_of(id, e));
      }
      if (e.cursor + 1 >= e.playback.size()) {
        e.done = true;
        out.push_back(reply("session.done", id,
                            {{"reason", to_string(e.playback_reason)}, {"iterations", e.playback.back().first}}));
      }
    }
  }
  return out;
}

std::vector<Message> SessionHub::tick() {
  std::vector<Message> out;
  for (auto& [id, e] : sessions_) {
    if (e->paused || e->done) continue;
    auto produced = advance(id, *e, 1);
    out.insert(out.end(), std::make_move_iterator(produced.begin()), std::make_move_iterator(produced.end()));
  }
  return out;
}

std::vector<Message> SessionHub::handle(const Message& msg) {
  try {
    if (msg.kind == "ping") return {reply("pong", msg.session, msg.payload)};
    if (msg.kind == "session.create") return create(msg);

    Entry& e = entry(msg.session);
    const std::string& id = msg.session;
    auto require_marl = [&](const char* what) -> Session& {
      if (!e.session) throw CommandError(std::string(what) + " is not supported for classic algorithms");
      return *e.session;
    };

    if (msg.kind == "control.pause") {
      e.paused = true;
      return {frame_of(id, e)};
    }
    if (msg.kind == "control.resume") {
      e.paused = false;
      return {};
    }
    if (msg.kind == "control.step") {
      return advance(id, e, positive_count(msg.payload, "count", 1));
    }
    if (msg.kind == "node.lock" || msg.kind == "node.unlock") {
      Session& s = require_marl(msg.kind.c_str());
      const NodeId v = resolve_node(e.graph, msg.payload);
      if (msg.kind == "node.lock") {
        s.lock_node(v);
      } else {
        s.unlock_node(v);
      }
      return {frame_of(id, e)};
    }
    if (msg.kind == "node.move") {
      Session& s = require_marl("node.move");
      const NodeId v = resolve_node(e.graph, msg.payload);
      const auto x = msg.payload.find("x");
      const auto y = msg.payload.find("y");
      if (x == msg.payload.end() || y == msg.payload.end() || !x->is_number() || !y->is_number()) {
        throw CommandError("node.move needs numeric x and y");
      }
      s.move_node(v, {x->get<double>(), y->get<double>()});
      return {frame_of(id, e)};
    }
    if (msg.kind == "param.set") {
      Session& s = require_marl("param.set");
      json params = msg.payload.value("params", json::object());
      if (msg.payload.contains("name")) params[msg.payload["name"].get<std::string>()] = msg.payload.value("value", json());
      if (!params.is_object() || params.empty()) throw CommandError("param.set needs params");
      if (params.contains("frame_every")) {
        json fe{{"frame_every", params["frame_every"]}};
        e.frame_every = positive_count(fe, "frame_every", 1);
        params.erase("frame_every");
      }
      json merged = e.config.to_json();
      for (const auto& [key, value] : params.items()) {
        if (!merged.contains(key)) throw CommandError("invalid parameter '" + key + "'");
        merged[key] = value;
      }
      const RunConfig next = RunConfig::from_json(merged);
      s.set_learn_config(next.session_config().learn);
      s.set_convergence_config(next.convergence());
      s.set_reward(next.reward_for(e.algorithm));
      e.config = next;
      e.done = s.check_convergence().has_value() && e.done;
      return {frame_of(id, e)};
    }
    if (msg.kind == "session.reset") {
      Session& s = require_marl("session.reset");
      s.reset(msg.payload.value("layout", false));
      e.done = false;
      return {frame_of(id, e)};
    }
    if (msg.kind == "session.close") {
      Message m = reply("session.done", id, {{"reason", "closed"}, {"iterations", e.session ? e.session->iteration() : 0}});
      sessions_.erase(id);
      return {m};
    }
    throw CommandError("unknown message kind '" + msg.kind + "'");
  } catch (const std::exception& ex) {
    return {error(msg, ex.what())};
  }
}

}  // namespace marll
