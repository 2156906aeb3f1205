#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace gossip {

// Binary relation over agents 0..n-1, one bit row per agent.
// Agent counts are capped at 64 so every row fits one machine word;
// exhaustive search dominates the workload and no instance needs more.
class Relation {
public:
    static constexpr int max_agents = 64;

    Relation() = default;
    explicit Relation(int n) : n_(n), rows_(static_cast<size_t>(n), 0) {
        assert(n >= 0 && n <= max_agents);
    }

    static Relation identity(int n) {
        Relation r(n);
        for (int x = 0; x < n; ++x) r.rows_[x] = bit(x);
        return r;
    }

    static Relation full(int n) {
        Relation r(n);
        for (int x = 0; x < n; ++x) r.rows_[x] = universe(n);
        return r;
    }

    int size() const { return n_; }

    bool contains(int x, int y) const { return (rows_[x] >> y) & 1u; }
    void add(int x, int y) { rows_[x] |= bit(y); }

    uint64_t row(int x) const { return rows_[x]; }
    void set_row(int x, uint64_t bits) { rows_[x] = bits; }

    bool subset_of(const Relation& o) const {
        for (int x = 0; x < n_; ++x)
            if (rows_[x] & ~o.rows_[x]) return false;
        return true;
    }

    Relation united(const Relation& o) const {
        Relation r(n_);
        for (int x = 0; x < n_; ++x) r.rows_[x] = rows_[x] | o.rows_[x];
        return r;
    }

    // {(x,z) | exists y: (x,y) here and (y,z) in o}
    Relation compose(const Relation& o) const {
        Relation r(n_);
        for (int x = 0; x < n_; ++x) {
            uint64_t acc = 0;
            for (uint64_t m = rows_[x]; m; m &= m - 1)
                acc |= o.rows_[std::countr_zero(m)];
            r.rows_[x] = acc;
        }
        return r;
    }

    Relation converse() const {
        Relation r(n_);
        for (int x = 0; x < n_; ++x)
            for (uint64_t m = rows_[x]; m; m &= m - 1)
                r.rows_[std::countr_zero(m)] |= bit(x);
        return r;
    }

    // Reflexive-transitive closure (Warshall with whole-row unions).
    Relation closure() const {
        Relation r = *this;
        for (int x = 0; x < n_; ++x) r.rows_[x] |= bit(x);
        for (int y = 0; y < n_; ++y)
            for (int x = 0; x < n_; ++x)
                if ((r.rows_[x] >> y) & 1u) r.rows_[x] |= r.rows_[y];
        return r;
    }

    bool operator==(const Relation& o) const = default;

    static uint64_t bit(int x) { return uint64_t{1} << x; }
    static uint64_t universe(int n) { return n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1; }

private:
    int n_ = 0;
    std::vector<uint64_t> rows_;
};

} // namespace gossip
