#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "c2p/tensor.hpp"

namespace c2p {

// One named parameter buffer with its paired gradient buffer.
struct ParamEntry {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> grads;  // always same length as values
};

// Named, shaped, flat numeric buffers. Entries keep insertion order so
// checkpoints and iteration are deterministic. Single writer: training
// mutates values/grads on one thread; concurrent reads between steps are
// fine.
class ParamStore {
 public:
  ParamEntry& add(const std::string& name, const Tensor& init);
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  ParamEntry& entry(const std::string& name);
  const ParamEntry& entry(const std::string& name) const;

  Tensor tensor(const std::string& name) const;  // copy of values

  const std::vector<ParamEntry>& entries() const { return entries_; }
  std::vector<ParamEntry>& entries() { return entries_; }
  std::size_t size() const { return entries_.size(); }

  void zero_grads();

  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }
  void bump_step() { ++step_; }

  // Names, shapes and values identical (bitwise on values).
  bool same_values(const ParamStore& other) const;

  std::size_t total_coords() const;

 private:
  std::vector<ParamEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t step_ = 0;
};

}  // namespace c2p
