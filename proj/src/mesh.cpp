#include "mesh.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace nric {

namespace {

std::pair<int, int> canonical(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

SimplicialSurface::SimplicialSurface(int vertexCount, const Eigen::MatrixXi& faces)
    : numVertices_(vertexCount), faces_(faces) {
    const int nf = static_cast<int>(faces.rows());
    if (nf == 0) throw MeshTopologyError("mesh has no faces");
    if (faces.cols() != 3) throw MeshTopologyError("faces must be triangles");
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            int v = faces(f, k);
            if (v < 0 || v >= vertexCount) throw MeshTopologyError("face vertex out of range");
        }
        if (faces(f, 0) == faces(f, 1) || faces(f, 1) == faces(f, 2) ||
            faces(f, 0) == faces(f, 2))
            throw MeshTopologyError("degenerate face with repeated vertex");
    }

    // Collect undirected edges with deterministic (lexicographic) indexing.
    std::map<std::pair<int, int>, int> edgeIndex;
    for (int f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k)
            edgeIndex.emplace(canonical(faces(f, k), faces(f, (k + 1) % 3)), 0);
    int ne = 0;
    for (auto& [key, idx] : edgeIndex) idx = ne++;
    edgeLookup_ = edgeIndex;

    edges_.resize(ne, 2);
    for (const auto& [key, idx] : edgeIndex) {
        edges_(idx, 0) = key.first;
        edges_(idx, 1) = key.second;
    }

    faceEdges_.resize(nf, 3);
    edgeFaces_ = Eigen::MatrixXi::Constant(ne, 2, -1);
    edgeOpposite_ = Eigen::MatrixXi::Constant(ne, 2, -1);
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            int a = faces(f, k), b = faces(f, (k + 1) % 3), c = faces(f, (k + 2) % 3);
            int e = edgeIndex.at(canonical(a, b));
            faceEdges_(f, k) = e;
            int side = (a == edges_(e, 0)) ? 0 : 1;
            if (edgeFaces_(e, side) >= 0)
                throw MeshTopologyError(
                    "non-manifold or inconsistently oriented mesh: directed edge used twice");
            edgeFaces_(e, side) = f;
            edgeOpposite_(e, side) = c;
        }
    }

    interiorEdgeIndex_.assign(ne, -1);
    boundaryVertex_.assign(vertexCount, false);
    for (int e = 0; e < ne; ++e) {
        if (edgeFaces_(e, 0) < 0) {
            // Canonical direction unused: reorient so side 0 is always present.
            std::swap(edgeFaces_(e, 0), edgeFaces_(e, 1));
            std::swap(edgeOpposite_(e, 0), edgeOpposite_(e, 1));
            int t = edges_(e, 0);
            edges_(e, 0) = edges_(e, 1);
            edges_(e, 1) = t;
        }
        if (edgeFaces_(e, 1) < 0) {
            boundaryVertex_[edges_(e, 0)] = true;
            boundaryVertex_[edges_(e, 1)] = true;
        } else {
            interiorEdgeIndex_[e] = static_cast<int>(interiorEdges_.size());
            interiorEdges_.push_back(e);
        }
    }

    // Dual graph across interior edges.
    dualGraph_.resize(nf);
    for (int e : interiorEdges_) {
        int f0 = edgeFaces_(e, 0), f1 = edgeFaces_(e, 1);
        dualGraph_[f0].emplace_back(f1, e);
        dualGraph_[f1].emplace_back(f0, e);
    }

    // Connectivity of the dual graph (faces).
    {
        std::vector<bool> seen(nf, false);
        std::queue<int> q;
        q.push(0);
        seen[0] = true;
        int count = 1;
        while (!q.empty()) {
            int f = q.front();
            q.pop();
            for (auto [g, e] : dualGraph_[f])
                if (!seen[g]) {
                    seen[g] = true;
                    ++count;
                    q.push(g);
                }
        }
        if (count != nf) throw MeshTopologyError("mesh is not connected");
    }

    // Boundary loop count: boundary edges must form disjoint simple cycles.
    {
        std::map<int, int> nextBoundary;  // vertex -> vertex along boundary
        for (int e = 0; e < ne; ++e) {
            if (edgeFaces_(e, 1) >= 0) continue;
            // Boundary edge oriented opposite to its face's traversal.
            int a = edges_(e, 0), b = edges_(e, 1);
            if (nextBoundary.count(b))
                throw MeshTopologyError("non-manifold boundary vertex");
            nextBoundary[b] = a;
        }
        std::set<int> visited;
        for (const auto& [v, w] : nextBoundary) {
            if (visited.count(v)) continue;
            ++boundaryLoops_;
            int cur = v;
            while (!visited.count(cur)) {
                visited.insert(cur);
                auto it = nextBoundary.find(cur);
                if (it == nextBoundary.end())
                    throw MeshTopologyError("open boundary chain");
                cur = it->second;
            }
        }
    }

    // Simple connectivity via the Euler characteristic.
    const int chi = eulerCharacteristic();
    if (boundaryLoops_ == 0) {
        if (chi != 2) throw MeshTopologyError("closed surface is not simply connected");
    } else if (boundaryLoops_ != 1 || chi != 1) {
        throw MeshTopologyError("surface with boundary is not a disk");
    }

    // Vertex fans for interior vertices. Walk: in face (v, a, b) the next fan
    // face lies across edge (v, b); the fan edge e_i is (v, a_i).
    std::vector<std::vector<int>> incidentFaces(vertexCount);
    for (int f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k) incidentFaces[faces(f, k)].push_back(f);

    fanIndex_.assign(vertexCount, -1);
    for (int v = 0; v < vertexCount; ++v) {
        if (boundaryVertex_[v] || incidentFaces[v].empty()) continue;
        VertexFan fan;
        fan.vertex = v;
        const int start = *std::min_element(incidentFaces[v].begin(), incidentFaces[v].end());
        int f = start;
        do {
            int p = 0;
            while (faces_(f, p) != v) ++p;
            int a = faces_(f, (p + 1) % 3), b = faces_(f, (p + 2) % 3);
            fan.faces.push_back(f);
            fan.edges.push_back(findEdge(v, a));
            fan.oppositeEdges.push_back(findEdge(a, b));
            int crossed = findEdge(v, b);
            int f0 = edgeFaces_(crossed, 0), f1 = edgeFaces_(crossed, 1);
            f = (f0 == f) ? f1 : f0;
            if (f < 0) throw MeshTopologyError("interior vertex fan hits the boundary");
        } while (f != start);
        if (fan.faces.size() != incidentFaces[v].size())
            throw MeshTopologyError("non-manifold vertex: fan does not cover all faces");
        fanIndex_[v] = static_cast<int>(fans_.size());
        interiorVertices_.push_back(v);
        fans_.push_back(std::move(fan));
    }
}

const VertexFan& SimplicialSurface::fan(int v) const {
    if (v < 0 || v >= numVertices_ || fanIndex_[v] < 0)
        throw MeshTopologyError("vertex has no interior fan");
    return fans_[fanIndex_[v]];
}

int SimplicialSurface::findEdge(int a, int b) const {
    auto it = edgeLookup_.find(canonical(a, b));
    return it == edgeLookup_.end() ? -1 : it->second;
}

}  // namespace nric
