#include "qjit_runtime.h"

/*
 * Opcode semantics for the bytecode engine.
 *
 * This file is the single source both interpreter backends and the JIT's
 * opcode templates are generated from. It is written in the documented C
 * subset: one dispatch switch over the current opcode, one case block per
 * opcode (fall-through groups allowed), and jumps restricted to local
 * labels, the shared jump_to_p2 label, and the named exit labels
 * (vdbe_return_row, vdbe_return_halt, abort_due_to_error).
 */

QJIT_NOINLINE int qjit_exec(QjitCtx *ctx) {
  QjitOp *aOp = ctx->ops;
  QjitCell *aMem = ctx->regs;
  QjitCursor *aCsr = ctx->cursors;
  QjitOp *pOp;
  QjitCell *pIn1;
  QjitCell *pIn3;
  QjitCell *pOut;
  QjitCursor *pC;
  int rc;
  int res;
  int take;

  for (pOp = &aOp[0]; 1; pOp++) {
    switch (pOp->opcode) {
      case OP_Init: {
        goto jump_to_p2;
      }
      case OP_Transaction: {
        break;
      }
      case OP_Integer: {
        pOut = &aMem[pOp->p2];
        qjit_set_int(pOut, pOp->p1);
        break;
      }
      case OP_OpenRead: {
        rc = qjit_open_read(ctx, pOp->p1, pOp->p2);
        if (rc) {
          goto abort_due_to_error;
        }
        break;
      }
      case OP_Rewind: {
        pC = &aCsr[pOp->p1];
        qjit_rewind(pC);
        if (pC->at_end) {
          goto jump_to_p2;
        }
        break;
      }
      case OP_Column: {
        pC = &aCsr[pOp->p1];
        pOut = &aMem[pOp->p3];
        rc = qjit_column(ctx, pC, pOp->p2, pOut);
        if (rc) {
          goto abort_due_to_error;
        }
        break;
      }
      case OP_Copy: {
        pIn1 = &aMem[pOp->p1];
        pOut = &aMem[pOp->p2];
        qjit_copy(pOut, pIn1);
        break;
      }
      case OP_ResultRow: {
        qjit_set_row(ctx, pOp->p1, pOp->p2);
        goto vdbe_return_row;
      }
      case OP_Next: {
        pC = &aCsr[pOp->p1];
        res = qjit_next(pC);
        if (res) {
          goto jump_to_p2;
        }
        break;
      }
      case OP_Goto: {
        goto jump_to_p2;
      }
      case OP_Halt: {
        goto vdbe_return_halt;
      }
      case OP_Eq:
      case OP_Ne:
      case OP_Lt:
      case OP_Le:
      case OP_Gt:
      case OP_Ge: {
        pIn3 = &aMem[pOp->p3];
        pIn1 = &aMem[pOp->p1];
        res = qjit_cmp(ctx, pIn3, pIn1);
        take = 0;
        if (pOp->opcode == OP_Eq) {
          take = (res == 0);
        } else if (pOp->opcode == OP_Ne) {
          take = (res != 0);
        } else if (pOp->opcode == OP_Lt) {
          take = (res < 0);
        } else if (pOp->opcode == OP_Le) {
          take = (res <= 0);
        } else if (pOp->opcode == OP_Gt) {
          take = (res > 0);
        } else {
          take = (res >= 0);
        }
        if (take) {
          goto jump_to_p2;
        }
        break;
      }
    }
  }

jump_to_p2:
  return 0;
}
