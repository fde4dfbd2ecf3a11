// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include "error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cjt {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "topology.n_bs",       "topology.n_tx",        "topology.n_ue",       "topology.serving_pattern",
    "channel.rho",         "channel.pathloss_exp", "channel.cell_radius_m", "channel.ref_loss_db",
    "noise.snr_db",        "run.seed",
};

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
    const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
    if (!node) return fallback;
    try {
        return node->get_value<T>();
    } catch (const pt::ptree_bad_data&) {
        throw ConfigError("config key '" + key + "' has a malformed value '" + node->data() + "'");
    }
}

// Section-less dotted keys land in the root with a literal '.' in the name;
// move them under their section so both spellings resolve identically.
pt::ptree normalise(const pt::ptree& raw) {
    pt::ptree out;
    for (const auto& [name, child] : raw) {
        if (child.empty()) {
            out.put(pt::ptree::path_type(name, '.'), child.data());
        } else {
            for (const auto& [key, leaf] : child)
                out.put(pt::ptree::path_type(name + "." + key, '.'), leaf.data());
        }
    }
    for (const auto& [section, child] : out)
        for (const auto& [key, leaf] : child) {
            (void)leaf;
            if (!kKnownKeys.contains(section + "." + key))
                throw ConfigError("unknown config key '" + section + "." + key + "'");
        }
    for (const auto& [section, child] : out)
        if (child.empty()) throw ConfigError("unknown config key '" + section + "'");
    return out;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    pt::ptree raw;
    std::istringstream is(text);
    try {
        pt::read_ini(is, raw);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    const pt::ptree tree = normalise(raw);

    ScenarioConfig c;
    c.n_bs = get(tree, "topology.n_bs", c.n_bs);
    c.n_tx = get(tree, "topology.n_tx", c.n_tx);
    c.n_ue = get(tree, "topology.n_ue", c.n_ue);
    c.serving_pattern = get(tree, "topology.serving_pattern", c.serving_pattern);
    c.channel.rho = get(tree, "channel.rho", c.channel.rho);
    c.channel.pathloss_exp = get(tree, "channel.pathloss_exp", c.channel.pathloss_exp);
    c.channel.cell_radius_m = get(tree, "channel.cell_radius_m", c.channel.cell_radius_m);
    c.channel.ref_loss_db = get(tree, "channel.ref_loss_db", c.channel.ref_loss_db);
    c.snr_db = get(tree, "noise.snr_db", c.snr_db);
    c.seed = get<std::uint64_t>(tree, "run.seed", c.seed);

    if (c.n_bs < 1 || c.n_tx < 1 || c.n_ue < 1) throw ConfigError("topology sizes must be >= 1");
    if (!(c.channel.rho >= 0.0 && c.channel.rho < 1.0)) throw ConfigError("channel.rho must lie in [0, 1)");
    if (!(c.channel.cell_radius_m > 0.0)) throw ConfigError("channel.cell_radius_m must be positive");
    (void)c.topology(); // validates the serving pattern
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

} // namespace cjt
