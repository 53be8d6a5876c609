// DOM-free session loop: the protocol logic behind the page.
//
// The server's next-item endpoint is idempotent, so the driver can resume a
// half-finished session (e.g. after a reload or a dropped connection) just
// by asking for the next item again.

import { Feedback, isDone, Item, Report, SessionApi, SessionInfo } from './api.js';

export type AnswerFn = (item: Item, info: SessionInfo) => Promise<1 | -1> | (1 | -1);

export interface SessionHooks {
  onItem?(item: Item): void | Promise<void>;
  onFeedback?(item: Item, feedback: Feedback, given: 1 | -1): void | Promise<void>;
  onDone?(report: Report): void | Promise<void>;
}

export interface CompletedSession {
  info: SessionInfo;
  report: Report;
  answered: { item: Item; given: 1 | -1; feedback: Feedback }[];
}

export class SessionDriver {
  constructor(private api: SessionApi) {}

  async run(group: string, answer: AnswerFn, hooks: SessionHooks = {}): Promise<CompletedSession> {
    const info = await this.api.createSession(group);
    return this.resume(info, answer, hooks);
  }

  async resume(
    info: SessionInfo,
    answer: AnswerFn,
    hooks: SessionHooks = {},
  ): Promise<CompletedSession> {
    const answered: CompletedSession['answered'] = [];
    for (;;) {
      const next = await this.api.nextItem(info.session_id);
      if (isDone(next)) {
        const report = await this.api.report(info.session_id);
        await hooks.onDone?.(report);
        return { info, report, answered };
      }
      await hooks.onItem?.(next);
      const given = await answer(next, info);
      const feedback = await this.api.submitAnswer(info.session_id, next.item_id, given);
      await hooks.onFeedback?.(next, feedback, given);
      answered.push({ item: next, given, feedback });
    }
  }
}
