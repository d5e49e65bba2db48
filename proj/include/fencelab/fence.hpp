#pragma once

#include "fencelab/rational.hpp"
#include "fencelab/sequence.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fencelab {

struct FenceError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// refinement tree of clopen pieces, each with a step envelope [lo, hi]
struct PieceNode {
    Rational lo, hi;
    std::vector<PieceNode> children;
};

struct FancyPairSpec {
    std::optional<PieceNode> root;
};

struct FancyReport {
    bool valid = true;
    std::string path;     // first offending node, "r" for the root, "r.0.1" for descendants
    std::string problem;  // empty when valid
};

FancyReport validate_fancy_pair(const FancyPairSpec& spec);

// envelope on a fine reference partition: one entry per leaf
struct StepLeaf {
    Rational lo, hi;
};

struct CarvedPart {
    std::vector<int> leaves;
    int attainer;  // leaf x_U
};

// coarse: parts as lists of leaf indices
std::vector<CarvedPart> carve_partition(const std::vector<StepLeaf>& env, const std::vector<std::vector<int>>& coarse,
                                        const Rational& epsilon);
bool carve_inequality_holds(const std::vector<StepLeaf>& env, const CarvedPart& part, const Rational& epsilon);

// canonical cut points of level n, increasing, avoiding every value in avoid
std::vector<Rational> canonical_cuts(int level, const std::vector<Rational>& avoid);

struct Piece {
    std::string path;
    Rational lo, hi;
    Rational x0, x1;  // column in the unit square
    int parent = -1;  // index into the previous level's pieces
};

struct Cell {
    int piece;     // index into pieces
    int interval;  // index into intervals
    Id id;
};

struct CellComplex {
    int level = 0;
    std::vector<Rational> cuts;
    std::vector<Piece> pieces;
    std::vector<Cell> cells;  // column by column, bottom to top

    // interval j is [cut j-1, cut j] with cut -1 = 0 and cut |cuts| = 1
    Rational interval_lo(int j) const;
    Rational interval_hi(int j) const;
    int interval_count() const { return static_cast<int>(cuts.size()) + 1; }
    std::vector<int> column(int piece) const;  // cell indices over one piece
};

struct Approximation {
    ProjectiveSequence seq;
    std::vector<CellComplex> complexes;  // one per level
};

Approximation build_approximation(const FancyPairSpec& spec, int depth);

struct Rect {
    Rational x0, x1, y0, y1;
};

struct RealizedCell {
    Id id;
    Rect rect;
};

struct Realization {
    std::vector<std::vector<RealizedCell>> levels;
};

Realization realize_cells(const Approximation& a);
Realization realize_abstract(const ProjectiveSequence& s);

Rational mesh(const Realization& r, int level);

// overlaps only along boundaries and every rectangle has interior
bool is_regular_quasi_partition(const std::vector<RealizedCell>& cells);

struct SvgStyle {
    std::string fill = "#d8e4f0";
    std::string stroke = "#1f3b57";
    std::string stroke_width = "0.002";
};

std::string render_svg(const Realization& r, int level, const SvgStyle& style = {});

}  // namespace fencelab
