#include "snm/topology.hpp"

#include <fstream>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace snm {

CacheTopology::CacheTopology(std::vector<CacheNode> nodes, std::string root_id)
    : nodes_(std::move(nodes)), root_(std::move(root_id)) {
    validate_and_index();
}

CacheTopology CacheTopology::single(std::int64_t capacity, const std::string& id) {
    return CacheTopology({CacheNode{id, capacity, {}}}, id);
}

void CacheTopology::validate_and_index() {
    if (nodes_.empty()) throw std::invalid_argument("topology: no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.capacity < 0) throw std::invalid_argument("topology: negative capacity");
        if (!index_.emplace(n.id, i).second)
            throw std::invalid_argument("topology: duplicate node id " + n.id);
    }
    if (!index_.count(root_)) throw std::invalid_argument("topology: unknown root " + root_);
    for (const auto& n : nodes_) {
        for (const auto& c : n.children) {
            if (!index_.count(c)) throw std::invalid_argument("topology: unknown child " + c);
            if (!parent_.emplace(c, n.id).second)
                throw std::invalid_argument("topology: node " + c + " has two parents");
        }
    }
    if (parent_.count(root_)) throw std::invalid_argument("topology: root has a parent");
    // Reachability from the root; also rules out cycles.
    std::size_t seen = 0;
    std::function<void(const std::string&)> walk = [&](const std::string& id) {
        ++seen;
        const auto& n = nodes_[index_.at(id)];
        if (n.children.empty()) leaves_.push_back(id);
        for (const auto& c : n.children) walk(c);
    };
    walk(root_);
    if (seen != nodes_.size())
        throw std::invalid_argument("topology: not all nodes reachable from the root");
}

const CacheNode& CacheTopology::node(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("topology: unknown node " + id);
    return nodes_[it->second];
}

bool CacheTopology::is_leaf(const std::string& id) const { return node(id).children.empty(); }

const std::string& CacheTopology::parent(const std::string& id) const {
    static const std::string empty;
    auto it = parent_.find(id);
    return it == parent_.end() ? empty : it->second;
}

CacheTopology CacheTopology::with_capacities(
    const std::unordered_map<std::string, std::int64_t>& caps) const {
    auto nodes = nodes_;
    for (auto& n : nodes) {
        auto it = caps.find(n.id);
        if (it != caps.end()) n.capacity = it->second;
    }
    return CacheTopology(nodes, root_);
}

CacheTopology CacheTopology::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<CacheNode> nodes;
    for (const auto& jn : j.at("nodes")) {
        CacheNode n;
        n.id = jn.at("id").get<std::string>();
        n.capacity = jn.at("capacity").get<std::int64_t>();
        if (jn.contains("children"))
            n.children = jn.at("children").get<std::vector<std::string>>();
        nodes.push_back(std::move(n));
    }
    return CacheTopology(std::move(nodes), j.at("root").get<std::string>());
}

CacheTopology CacheTopology::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topology file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

std::string CacheTopology::to_json_string() const {
    nlohmann::json j;
    j["root"] = root_;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nlohmann::json jn{{"id", n.id}, {"capacity", n.capacity}};
        jn["children"] = n.children;
        j["nodes"].push_back(jn);
    }
    return j.dump(2);
}

}  // namespace snm
