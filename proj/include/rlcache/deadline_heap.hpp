#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rlcache/types.hpp"

namespace rlcache {

// Indexed binary min-heap of (deadline, key). Keys are unique; removal by key
// is O(log n), so the heap never holds a node for a key that is gone. Equal
// deadlines pop in insertion order.
class DeadlineHeap {
 public:
  struct Node {
    Timestamp deadline;
    std::uint64_t seq;
    std::string key;
  };

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const std::string& key) const { return index_.count(key) != 0; }

  std::optional<Timestamp> deadline_of(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return nodes_[it->second].deadline;
  }

  // Inserts, or moves an existing key to the new deadline.
  void push(const std::string& key, Timestamp deadline) {
    erase(key);
    nodes_.push_back({deadline, next_seq_++, key});
    index_[key] = nodes_.size() - 1;
    sift_up(nodes_.size() - 1);
  }

  bool erase(const std::string& key) {
    auto it = index_.find(key);
    if (it == index_.end()) return false;
    remove_at(it->second);
    return true;
  }

  const Node& top() const { return nodes_.front(); }

  Node pop() {
    Node out = nodes_.front();
    remove_at(0);
    return out;
  }

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  static bool less(const Node& a, const Node& b) {
    return a.deadline < b.deadline || (a.deadline == b.deadline && a.seq < b.seq);
  }

  void place(std::size_t i) { index_[nodes_[i].key] = i; }

  void swap_nodes(std::size_t a, std::size_t b) {
    std::swap(nodes_[a], nodes_[b]);
    place(a);
    place(b);
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!less(nodes_[i], nodes_[parent])) break;
      swap_nodes(i, parent);
      i = parent;
    }
  }

  void sift_down(std::size_t i) {
    const std::size_t n = nodes_.size();
    for (;;) {
      std::size_t best = i;
      const std::size_t l = 2 * i + 1, r = l + 1;
      if (l < n && less(nodes_[l], nodes_[best])) best = l;
      if (r < n && less(nodes_[r], nodes_[best])) best = r;
      if (best == i) return;
      swap_nodes(i, best);
      i = best;
    }
  }

  void remove_at(std::size_t i) {
    index_.erase(nodes_[i].key);
    const std::size_t last = nodes_.size() - 1;
    if (i != last) {
      nodes_[i] = std::move(nodes_[last]);
      nodes_.pop_back();
      place(i);
      sift_down(i);
      sift_up(i);
    } else {
      nodes_.pop_back();
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace rlcache
