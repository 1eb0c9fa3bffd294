#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace snm {

struct CacheNode {
    std::string id;
    std::int64_t capacity = 0;  // in contents
    std::vector<std::string> children;
};

// Tree of capacitated caches. Requests enter at leaves; misses are forwarded
// towards the root, above which sits an implicit infinite repository.
class CacheTopology {
  public:
    CacheTopology(std::vector<CacheNode> nodes, std::string root_id);

    // Convenience: one node that is both root and leaf.
    static CacheTopology single(std::int64_t capacity, const std::string& id = "cache");

    static CacheTopology from_json_file(const std::string& path);
    static CacheTopology from_json_string(const std::string& text);
    std::string to_json_string() const;

    const std::vector<CacheNode>& nodes() const { return nodes_; }
    const std::string& root() const { return root_; }
    const std::vector<std::string>& leaves() const { return leaves_; }

    bool has_node(const std::string& id) const { return index_.count(id) > 0; }
    const CacheNode& node(const std::string& id) const;
    bool is_leaf(const std::string& id) const;
    // Parent id, or empty string for the root.
    const std::string& parent(const std::string& id) const;

    CacheTopology with_capacities(const std::unordered_map<std::string, std::int64_t>&) const;

  private:
    void validate_and_index();
    std::vector<CacheNode> nodes_;
    std::string root_;
    std::vector<std::string> leaves_;
    std::unordered_map<std::string, std::size_t> index_;
    std::unordered_map<std::string, std::string> parent_;
};

}  // namespace snm
