#include "polylearn/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace polylearn {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_short(double value) {
  char buf[40];
  const auto end = std::to_chars(buf, buf + sizeof buf, value).ptr;
  return std::string(buf, end);
}

std::string to_json(const DiscreteBayesNet& bn) {
  std::ostringstream out;
  const std::size_t n = bn.vertex_count();
  out << "{\"n\": " << n << ", \"alphabet\": [";
  for (std::size_t i = 0; i < n; ++i) out << (i ? ", " : "") << bn.alphabet().size(i);
  out << "], \"edges\": [";
  bool first = true;
  for (const Arc& a : bn.graph().arcs()) {
    out << (first ? "" : ", ") << '[' << a.parent << ", " << a.child << ']';
    first = false;
  }
  out << "], \"cpts\": [";
  for (Vertex v = 0; v < n; ++v) {
    const Cpt& cpt = bn.cpt(v);
    out << (v ? ", " : "") << "{\"node\": " << v << ", \"parents\": [";
    for (std::size_t i = 0; i < cpt.parents.size(); ++i) out << (i ? ", " : "") << cpt.parents[i];
    out << "], \"table\": [";
    for (std::size_t r = 0; r < cpt.rows; ++r) {
      out << (r ? ", " : "") << '[';
      for (std::size_t x = 0; x < cpt.cols; ++x) out << (x ? ", " : "") << format_real(cpt(r, x));
      out << ']';
    }
    out << "]}";
  }
  out << "]}\n";
  return out.str();
}

DiscreteBayesNet bayes_net_from_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("model JSON does not parse: ") + e.what());
  }
  try {
    const auto n = doc.at("n").get<std::size_t>();
    Alphabet alphabet(doc.at("alphabet").get<std::vector<std::size_t>>());
    if (alphabet.variable_count() != n) throw std::invalid_argument("alphabet length differs from n");
    std::vector<Arc> arcs;
    for (const auto& e : doc.at("edges")) {
      if (e.size() != 2) throw std::invalid_argument("edge entries must be [parent, child]");
      arcs.push_back({e[0].get<Vertex>(), e[1].get<Vertex>()});
    }
    PolytreeGraph graph(n, std::move(arcs));

    std::vector<Cpt> cpts(n);
    std::vector<bool> seen(n, false);
    for (const auto& c : doc.at("cpts")) {
      const auto node = c.at("node").get<Vertex>();
      if (node >= n || seen[node]) throw std::invalid_argument("CPT node missing, repeated or out of range");
      seen[node] = true;
      Cpt& cpt = cpts[node];
      cpt.node = node;
      cpt.parents = c.at("parents").get<std::vector<Vertex>>();
      const auto& rows = c.at("table");
      cpt.rows = rows.size();
      cpt.cols = rows.empty() ? 0 : rows.front().size();
      for (const auto& row : rows) {
        if (row.size() != cpt.cols) throw std::invalid_argument("ragged CPT table");
        for (const auto& p : row) cpt.table.push_back(p.get<double>());
      }
    }
    return DiscreteBayesNet(std::move(graph), std::move(alphabet), std::move(cpts));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
  }
}

void save_bayes_net(const DiscreteBayesNet& bn, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(bn);
}

DiscreteBayesNet load_bayes_net(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return bayes_net_from_json(buf.str());
}

}  // namespace polylearn
