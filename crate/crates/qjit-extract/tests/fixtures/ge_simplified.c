#include "qjit_runtime.h"

int qjit_exec_fixture(QjitCtx *ctx) {
  QjitOp *aOp = ctx->ops;
  QjitCell *aMem = ctx->regs;
  QjitCursor *aCsr = ctx->cursors;
  QjitOp *pOp;
  QjitCell *pIn1;
  QjitCell *pIn3;

  for (pOp = &aOp[0]; 1; pOp++) {
    switch (pOp->opcode) {
      case OP_Ge: {
        pIn3 = &aMem[pOp->p3];
        pIn1 = &aMem[pOp->p1];
        if (pIn3->u.i >= pIn1->u.i) {
          goto jump_to_p2;
        }
        break;
      }
    }
  }

jump_to_p2:
  return 0;
}
