#include "c2p/param_store.hpp"

namespace c2p {

ParamEntry& ParamStore::add(const std::string& name, const Tensor& init) {
  if (has(name)) throw InvalidInput("duplicate parameter name: " + name);
  ParamEntry e;
  e.name = name;
  e.shape = init.shape();
  e.values = init.values();
  e.grads.assign(e.values.size(), 0.0);
  entries_.push_back(std::move(e));
  index_[name] = entries_.size() - 1;
  return entries_.back();
}

ParamEntry& ParamStore::entry(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw InvalidInput("unknown parameter: " + name);
  return entries_[it->second];
}

const ParamEntry& ParamStore::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InvalidInput("unknown parameter: " + name);
  return entries_[it->second];
}

Tensor ParamStore::tensor(const std::string& name) const {
  const ParamEntry& e = entry(name);
  return Tensor(e.shape, e.values);
}

void ParamStore::zero_grads() {
  for (auto& e : entries_) {
    std::fill(e.grads.begin(), e.grads.end(), 0.0);
  }
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const ParamEntry& a = entries_[i];
    const ParamEntry& b = other.entries_[i];
    if (a.name != b.name || a.shape != b.shape) return false;
    if (a.values.size() != b.values.size()) return false;
    for (std::size_t j = 0; j < a.values.size(); ++j) {
      if (a.values[j] != b.values[j]) return false;
    }
  }
  return true;
}

std::size_t ParamStore::total_coords() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.values.size();
  return n;
}

}  // namespace c2p
