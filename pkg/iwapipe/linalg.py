"""
Subspace arithmetic over finite fields

Subspaces are stored as matrices whose rows span them, always in reduced row echelon form
with zero rows removed, so equal subspaces have equal matrices.
"""

import numpy as np

def as_field(field, rows, ncols):
    """a 2-D field array from a possibly empty list of row blocks"""
    blocks = [np.asarray(block.view(np.ndarray) if hasattr(block, 'view') else block, dtype=np.int64).reshape(-1, ncols) for block in rows]
    blocks = [block for block in blocks if block.shape[0] > 0]
    if not blocks:
        return field.Zeros((0, ncols))
    return field(np.vstack(blocks))

def rowspace(matrix):
    """reduced echelon basis of the row space"""
    field = type(matrix)
    if matrix.shape[0] == 0:
        return field.Zeros((0, matrix.shape[1]))
    reduced = matrix.row_reduce()
    nonzero = np.any(reduced != 0, axis=1)
    return reduced[nonzero]

def span(field, blocks, ncols):
    """reduced echelon basis of the span of all rows in `blocks`"""
    return rowspace(as_field(field, blocks, ncols))

def rank(matrix):
    return rowspace(matrix).shape[0]

def contains(space, vectors):
    """whether every row of `vectors` lies in the row space `space`"""
    if vectors.shape[0] == 0:
        return True
    field = type(space)
    joint = span(field, [space, vectors], space.shape[1])
    return joint.shape[0] == rowspace(space).shape[0]

def same_space(U, V):
    return rowspace(U).shape == rowspace(V).shape and np.array_equal(rowspace(U), rowspace(V))

def coordinate_space(field, columns, ncols):
    """span of the standard basis vectors indexed by `columns`"""
    columns = list(columns)
    basis = field.Zeros((len(columns), ncols))
    for row, col in enumerate(columns):
        basis[row, col] = 1
    return basis

def solve_columns(field, columns, target):
    """the coefficients c with sum_j c_j columns[j] = target, columns linearly independent

    Returns None when the system has no solution.
    """
    A = np.asarray(columns, dtype=np.int64).T % field.characteristic
    m = A.shape[1]
    augmented = field(np.concatenate([A, np.asarray(target, dtype=np.int64).reshape(-1, 1) % field.characteristic], axis=1))
    reduced = augmented.row_reduce()
    if np.any(reduced[m:, -1] != 0):
        return None
    if not np.array_equal(reduced[:m, :m], field.Identity(m)):
        raise ValueError('columns are linearly dependent')
    return [int(c) for c in reduced[:m, -1]]

def kron(A, B):
    """Kronecker product of field matrices"""
    field = type(A)
    out = A[:, None, :, None]*B[None, :, None, :]
    return field(out.reshape(A.shape[0]*B.shape[0], A.shape[1]*B.shape[1]))

def is_invertible(A):
    return A.shape[0] == A.shape[1] and rank(A) == A.shape[0]

def random_matrix(field, shape, rng):
    return field(rng.integers(0, field.order, size=shape))

def random_invertible(field, n, rng):
    while True:
        A = random_matrix(field, (n, n), rng)
        if is_invertible(A):
            return A

def complement_basis(chain):
    """an adapted basis for a decreasing chain of row spaces F_0 > F_1 > ... > F_L = 0

    Returns (basis, degrees): the rows of `basis` are a basis of F_0, and the rows of
    degree >= j span F_j.
    """
    field = type(chain[0])
    ncols = chain[0].shape[1]
    rows, degrees = [], []
    current = field.Zeros((0, ncols))
    for j in range(len(chain) - 1, -1, -1):
        for vector in chain[j]:
            candidate = span(field, [current, vector[None, :]], ncols)
            if candidate.shape[0] > current.shape[0]:
                current = candidate
                rows.append(vector)
                degrees.append(j)
    order = np.argsort(degrees, kind='stable')
    basis = as_field(field, [rows[i][None, :] for i in order], ncols)
    return basis, [degrees[i] for i in order]
