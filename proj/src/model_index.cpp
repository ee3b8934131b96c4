#include "ssreg/model_index.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ssreg {

ModelIndex::ModelIndex(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && members_.front() < 1)
        throw std::invalid_argument("model indices are 1-based; got " +
                                    std::to_string(members_.front()));
}

ModelIndex ModelIndex::parse(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stoi(tok));
    }
    return ModelIndex(std::move(out));
}

bool ModelIndex::contains(int j) const {
    return std::binary_search(members_.begin(), members_.end(), j);
}

ModelIndex ModelIndex::union_with(const ModelIndex& other) const {
    std::vector<int> out;
    out.reserve(members_.size() + other.members_.size());
    std::set_union(members_.begin(), members_.end(),
                   other.members_.begin(), other.members_.end(), std::back_inserter(out));
    ModelIndex m;
    m.members_ = std::move(out);
    return m;
}

ModelIndex ModelIndex::difference(const ModelIndex& other) const {
    std::vector<int> out;
    std::set_difference(members_.begin(), members_.end(),
                        other.members_.begin(), other.members_.end(), std::back_inserter(out));
    ModelIndex m;
    m.members_ = std::move(out);
    return m;
}

ModelIndex ModelIndex::intersect(const ModelIndex& other) const {
    std::vector<int> out;
    std::set_intersection(members_.begin(), members_.end(),
                          other.members_.begin(), other.members_.end(), std::back_inserter(out));
    ModelIndex m;
    m.members_ = std::move(out);
    return m;
}

bool ModelIndex::contains_all(const ModelIndex& other) const {
    return std::includes(members_.begin(), members_.end(),
                         other.members_.begin(), other.members_.end());
}

ModelIndex ModelIndex::with(int j) const {
    std::vector<int> out = members_;
    out.push_back(j);
    return ModelIndex(std::move(out));
}

ModelIndex ModelIndex::without(int j) const {
    std::vector<int> out;
    out.reserve(members_.size());
    for (int m : members_)
        if (m != j) out.push_back(m);
    ModelIndex m;
    m.members_ = std::move(out);
    return m;
}

std::string ModelIndex::key() const {
    std::string k;
    for (int j : members_) {
        k += std::to_string(j);
        k += ';';
    }
    return k;
}

std::string ModelIndex::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(members_[i]);
    }
    s += '}';
    return s;
}

} // namespace ssreg
