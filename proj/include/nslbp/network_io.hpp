#pragma once

#include <string>

#include "nslbp/lbp_net.hpp"

namespace nslbp {

// Versioned JSON schema for network descriptions (see README for the format).
NetworkSpec network_from_json(const std::string& text);
std::string network_to_json(const NetworkSpec& net);
NetworkSpec load_network(const std::string& path);
void save_network(const std::string& path, const NetworkSpec& net);

}  // namespace nslbp
