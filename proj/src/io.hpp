#pragma once

#include <string>

#include "mesh.hpp"

namespace nric {

struct MeshData {
    Eigen::MatrixXi faces;
    VertexPositions positions;
};

// Reads a triangle mesh from OBJ or OFF (chosen by file extension).
MeshData readMesh(const std::string& path);

void writeObj(const std::string& path, const Eigen::MatrixXi& faces,
              const VertexPositions& positions);

// NRIC text format: header "NRIC <|V|> <|E|> <|F|>", then one line per edge
// "<v0> <v1> <length> <angle|NA>" with 17 significant digits.
void writeNric(const std::string& path, const SimplicialSurface& surface,
               const NricVector& z);

// Reads an NRIC file against known connectivity; the edge list must match.
NricVector readNric(const std::string& path, const SimplicialSurface& surface);

}  // namespace nric
