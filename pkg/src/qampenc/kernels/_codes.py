# Gate kind codes shared by the compiled gate table and both kernel backends.
K_X = 0
K_H = 1
K_RY = 2
K_PHASE = 3
K_Z = 4
K_SWAP = 5

# classical_condition encoding: -1 unconditional, 0 skip, 1 apply
COND_NONE = -1
