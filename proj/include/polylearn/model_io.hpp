#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "polylearn/bayes_net.hpp"

namespace polylearn {

/// Serializes a network as
///   {"n": .., "alphabet": [..], "edges": [[parent, child], ..],
///    "cpts": [{"node": .., "parents": [..], "table": [[..], ..]}, ..]}
/// Floats are written with 17 significant digits so that load/save is
/// byte-stable.
std::string to_json(const DiscreteBayesNet& bn);

/// Throws std::invalid_argument on malformed documents or invalid CPTs.
DiscreteBayesNet bayes_net_from_json(std::string_view text);

void save_bayes_net(const DiscreteBayesNet& bn, const std::filesystem::path& path);
DiscreteBayesNet load_bayes_net(const std::filesystem::path& path);

/// %.17g, the canonical float text of every model and report writer.
std::string format_real(double value);
/// Shortest text that reads back to the same double. Used to echo config values.
std::string format_short(double value);

}  // namespace polylearn
