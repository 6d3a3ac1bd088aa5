/* C interface for the NRIC geometry library: triangle meshes represented by
 * edge lengths and dihedral angles, constrained elastic optimization,
 * rigidity analysis, discrete geodesics, and position reconstruction.
 *
 * All objects are opaque handles; every fallible call returns a status code
 * and leaves a description retrievable via nric_last_error(). Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with nric_string_free().
 */
#ifndef NRIC_H
#define NRIC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    NRIC_OK = 0,
    NRIC_ERR_PARSE = 1,        /* unreadable/malformed file or config */
    NRIC_ERR_TOPOLOGY = 2,     /* mesh not manifold/oriented/simply connected */
    NRIC_ERR_INFEASIBLE = 3,   /* degenerate faces or violated inequalities */
    NRIC_ERR_NOT_CONVERGED = 4,
    NRIC_ERR_INVALID_ARGUMENT = 5,
    NRIC_ERR_INTERNAL = 6
} nric_status;

typedef struct nric_mesh nric_mesh;     /* connectivity + vertex positions */
typedef struct nric_coords nric_coords; /* edge lengths + dihedral angles */

/* Thread-local description of the most recent failure. */
const char* nric_last_error(void);
void nric_string_free(char* s);

/* ---- meshes -------------------------------------------------------- */

/* Reads OBJ or OFF (by extension); validates the connectivity. */
nric_status nric_mesh_load(const char* path, nric_mesh** out);
nric_status nric_mesh_save_obj(const nric_mesh* mesh, const char* path);
void nric_mesh_free(nric_mesh* mesh);

int nric_mesh_vertex_count(const nric_mesh* mesh);
int nric_mesh_edge_count(const nric_mesh* mesh);
int nric_mesh_interior_edge_count(const nric_mesh* mesh);
int nric_mesh_face_count(const nric_mesh* mesh);
int nric_mesh_euler_characteristic(const nric_mesh* mesh);
int nric_mesh_is_closed(const nric_mesh* mesh);

/* ---- coordinates --------------------------------------------------- */

/* Forward map of the stored vertex positions. */
nric_status nric_coords_from_mesh(const nric_mesh* mesh, nric_coords** out);
/* NRIC text file, validated against the mesh connectivity. */
nric_status nric_coords_load(const char* path, const nric_mesh* mesh, nric_coords** out);
nric_status nric_coords_save(const nric_coords* coords, const nric_mesh* mesh,
                             const char* path);
void nric_coords_free(nric_coords* coords);

/* ---- options ------------------------------------------------------- */

typedef enum { NRIC_ENERGY_NONLINEAR = 0, NRIC_ENERGY_QUADRATIC = 1 } nric_energy_kind;
typedef enum {
    NRIC_TREE_BFS = 0,
    NRIC_TREE_MST = 1,
    NRIC_TREE_SPT = 2,
    NRIC_TREE_PREASSEMBLED = 3
} nric_tree_strategy;

typedef struct {
    /* augmented Lagrange / Newton */
    double mu0, lambda0, mu_plus, eta_plus;
    double eps_q, eps_l;
    int k_max, j_max;
    double tau_plus, beta_shift;
    double armijo_sigma, backtrack, min_step;
    int bfgs_warm_start, bfgs_iterations;
    /* material */
    double mu_mat, lambda_mat, delta;
    int energy;        /* nric_energy_kind */
    int weight_recipe; /* 0: alpha = l^-2; 1: alpha = d l^-2 */
    int threads;       /* worker cap; 0 keeps the library default */
} nric_options;

void nric_options_init(nric_options* options);
/* key = value file covering every field above. */
nric_status nric_options_load(const char* path, nric_options* options);

/* ---- operations ---------------------------------------------------- *
 * Solver-backed calls (deform/average/geodesic) return
 * NRIC_ERR_NOT_CONVERGED when the iteration limit is hit; the out-handles
 * and report are still populated with the final iterate in that case. */

/* Integrability / triangle-inequality report for coords on mesh. */
nric_status nric_check(const nric_mesh* mesh, const nric_coords* coords, char** report);

/* Infinitesimal rigidity. angle_selector: optional 0/1 array over interior
 * edges restricting the candidate angle subspace (NULL: all). Outcome 1 if a
 * candidate isometric variation exists, 0 if lambda0 is clearly positive,
 * 2 if the selector leaves no candidate subspace. */
nric_status nric_rigidity(const nric_mesh* mesh, const nric_coords* coords,
                          const int* angle_selector, double* lambda0, int* outcome,
                          char** report);

/* Constrained deformation: minimize the dissimilarity to coords subject to
 * integrability, with coordinates fixed per the constraint file (may be
 * NULL). */
nric_status nric_deform(const nric_mesh* mesh, const nric_coords* coords,
                        const char* constraint_path, const nric_options* options,
                        nric_coords** out, char** report);

/* Weighted elastic average of n example coordinate vectors. */
nric_status nric_average(const nric_mesh* mesh, const nric_coords* const* examples,
                         const double* weights, int n, const nric_options* options,
                         nric_coords** out, char** report);

/* Time-discrete geodesic with K segments; fills shapes[0..K] (caller array,
 * each entry becomes an owned handle). fix_lengths eliminates all length
 * variables at the endpoint values. */
nric_status nric_geodesic(const nric_mesh* mesh, const nric_coords* a,
                          const nric_coords* b, int K, int fix_lengths,
                          const nric_options* options, nric_coords** shapes,
                          char** report);

/* Vertex-position reconstruction; returns a new mesh with the input
 * connectivity. samples (optional) feed the preassembled-tree strategy. */
nric_status nric_reconstruct(const nric_mesh* mesh, const nric_coords* coords,
                             nric_tree_strategy strategy, int gauss_newton_steps,
                             const nric_coords* const* samples, int sample_count,
                             nric_mesh** out, char** report);

#ifdef __cplusplus
}
#endif

#endif /* NRIC_H */
