#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace ssreg {

//! A sparse support set: sorted, duplicate-free column indices in [1, p].
//!
//! Indices are 1-based to match the usual regression convention where
//! column j of the design matrix carries coefficient j.
class ModelIndex {
public:
    ModelIndex() = default;

    //! Builds from arbitrary (possibly unsorted, duplicated) indices.
    explicit ModelIndex(std::vector<int> members);

    //! Parses a comma-separated list such as "1,3,7". Empty string -> empty model.
    static ModelIndex parse(const std::string& text);

    const std::vector<int>& members() const { return members_; }
    int size() const { return static_cast<int>(members_.size()); }
    bool empty() const { return members_.empty(); }
    bool contains(int j) const;

    //! Largest member, 0 for the empty model.
    int max_member() const { return members_.empty() ? 0 : members_.back(); }

    ModelIndex union_with(const ModelIndex& other) const;
    ModelIndex difference(const ModelIndex& other) const;   // *this \ other
    ModelIndex intersect(const ModelIndex& other) const;
    bool contains_all(const ModelIndex& other) const;       // other subseteq *this

    ModelIndex with(int j) const;     // adds j
    ModelIndex without(int j) const;  // removes j

    //! Canonical compact encoding, usable as a hash/map key.
    std::string key() const;

    //! Renders as "{1,3,7}" (or "{}" when empty) for messages and CSV cells.
    std::string to_string() const;

    bool operator==(const ModelIndex& other) const { return members_ == other.members_; }
    bool operator!=(const ModelIndex& other) const { return members_ != other.members_; }
    bool operator<(const ModelIndex& other) const { return members_ < other.members_; }

private:
    std::vector<int> members_;
};

struct ModelIndexHash {
    std::size_t operator()(const ModelIndex& m) const {
        std::size_t h = 1469598103934665603ull;
        for (int j : m.members()) {
            h ^= static_cast<std::size_t>(j);
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace ssreg
