#include "io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace nric {

namespace {

std::string lowerExtension(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(c));
    return ext;
}

MeshData readObj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::vector<Eigen::Vector3d> verts;
    std::vector<Eigen::Vector3i> faces;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Eigen::Vector3d p;
            if (!(ss >> p.x() >> p.y() >> p.z()))
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad vertex");
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                // accept "i", "i/t", "i/t/n", "i//n"
                idx.push_back(std::stoi(tok.substr(0, tok.find('/'))));
            }
            if (idx.size() != 3)
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": only triangle faces are supported");
            faces.push_back(Eigen::Vector3i(idx[0] - 1, idx[1] - 1, idx[2] - 1));
        }
    }
    MeshData m;
    m.positions.resize(static_cast<int>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) m.positions.row(static_cast<int>(i)) = verts[i];
    m.faces.resize(static_cast<int>(faces.size()), 3);
    for (size_t i = 0; i < faces.size(); ++i) m.faces.row(static_cast<int>(i)) = faces[i];
    return m;
}

MeshData readOff(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "OFF") throw ParseError(path + ": missing OFF header");
    int nv = 0, nf = 0, ne = 0;
    if (!(in >> nv >> nf >> ne)) throw ParseError(path + ": bad OFF counts");
    MeshData m;
    m.positions.resize(nv, 3);
    for (int i = 0; i < nv; ++i) {
        if (!(in >> m.positions(i, 0) >> m.positions(i, 1) >> m.positions(i, 2)))
            throw ParseError(path + ": bad vertex " + std::to_string(i));
    }
    m.faces.resize(nf, 3);
    for (int f = 0; f < nf; ++f) {
        int k = 0;
        if (!(in >> k)) throw ParseError(path + ": bad face " + std::to_string(f));
        if (k != 3) throw ParseError(path + ": only triangle faces are supported");
        if (!(in >> m.faces(f, 0) >> m.faces(f, 1) >> m.faces(f, 2)))
            throw ParseError(path + ": bad face " + std::to_string(f));
    }
    return m;
}

}  // namespace

MeshData readMesh(const std::string& path) {
    std::string ext = lowerExtension(path);
    if (ext == "obj") return readObj(path);
    if (ext == "off") return readOff(path);
    throw ParseError("unsupported mesh format: " + path);
}

void writeObj(const std::string& path, const Eigen::MatrixXi& faces,
              const VertexPositions& positions) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << std::setprecision(17);
    for (int i = 0; i < positions.rows(); ++i)
        out << "v " << positions(i, 0) << " " << positions(i, 1) << " " << positions(i, 2)
            << "\n";
    for (int f = 0; f < faces.rows(); ++f)
        out << "f " << faces(f, 0) + 1 << " " << faces(f, 1) + 1 << " " << faces(f, 2) + 1
            << "\n";
    if (!out) throw ParseError("write failed: " + path);
}

void writeNric(const std::string& path, const SimplicialSurface& surface,
               const NricVector& z) {
    if (z.lengths.size() != surface.edgeCount() ||
        z.angles.size() != surface.interiorEdgeCount())
        throw ParseError("writeNric: coordinate sizes do not match the surface");
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << std::setprecision(17);
    out << "NRIC " << surface.vertexCount() << " " << surface.edgeCount() << " "
        << surface.faceCount() << "\n";
    for (int e = 0; e < surface.edgeCount(); ++e) {
        out << surface.edges()(e, 0) << " " << surface.edges()(e, 1) << " " << z.lengths[e]
            << " ";
        int j = surface.interiorEdgeIndex(e);
        if (j < 0)
            out << "NA\n";
        else
            out << z.angles[j] << "\n";
    }
    if (!out) throw ParseError("write failed: " + path);
}

NricVector readNric(const std::string& path, const SimplicialSurface& surface) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string magic;
    int nv = 0, ne = 0, nf = 0;
    if (!(in >> magic >> nv >> ne >> nf) || magic != "NRIC")
        throw ParseError(path + ": missing NRIC header");
    if (nv != surface.vertexCount() || ne != surface.edgeCount() ||
        nf != surface.faceCount())
        throw ParseError(path + ": header counts do not match the mesh");
    NricVector z = NricVector::zero(surface);
    for (int e = 0; e < ne; ++e) {
        int a = 0, b = 0;
        double len = 0.0;
        std::string angleTok;
        if (!(in >> a >> b >> len >> angleTok))
            throw ParseError(path + ": truncated edge record " + std::to_string(e));
        int idx = surface.findEdge(a, b);
        if (idx != e)
            throw ParseError(path + ": edge (" + std::to_string(a) + ", " + std::to_string(b) +
                             ") does not match the mesh edge order");
        z.lengths[e] = len;
        int j = surface.interiorEdgeIndex(e);
        if (angleTok == "NA") {
            if (j >= 0)
                throw ParseError(path + ": interior edge " + std::to_string(e) +
                                 " is missing its angle");
        } else {
            if (j < 0)
                throw ParseError(path + ": boundary edge " + std::to_string(e) +
                                 " carries an angle");
            try {
                z.angles[j] = std::stod(angleTok);
            } catch (const std::exception&) {
                throw ParseError(path + ": bad angle on edge " + std::to_string(e));
            }
        }
    }
    return z;
}

}  // namespace nric
