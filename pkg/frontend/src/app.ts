// Browser page for live teach-then-test sessions.
//
// State beyond the session token lives on the server; reloading the page
// resumes at the current item because next-item is idempotent.

import { ApiError, Feedback, Item, Report, SessionApi, SessionInfo } from './api.js';
import { SessionDriver } from './session.js';

const FEEDBACK_DWELL_MS = 1500;

interface Stored {
  baseUrl: string;
  info: SessionInfo;
}

function elements() {
  const get = (id: string) => document.getElementById(id)!;
  return {
    start: get('start-screen'),
    run: get('run-screen'),
    done: get('done-screen'),
    baseUrl: get('base-url') as HTMLInputElement,
    group: get('group') as HTMLInputElement,
    startButton: get('start-button') as HTMLButtonElement,
    phase: get('phase'),
    progress: get('progress'),
    card: get('item-card'),
    buttonPos: get('answer-pos') as HTMLButtonElement,
    buttonNeg: get('answer-neg') as HTMLButtonElement,
    feedback: get('feedback'),
    banner: get('error-banner'),
    score: get('score'),
    restart: get('restart-button') as HTMLButtonElement,
  };
}

function show(el: HTMLElement, visible: boolean) {
  el.classList.toggle('hidden', !visible);
}

function renderItem(card: HTMLElement, item: Item, baseUrl: string) {
  card.innerHTML = '';
  if (item.asset) {
    const img = document.createElement('img');
    img.src = item.asset.startsWith('http') ? item.asset : `${baseUrl}${item.asset}`;
    img.alt = item.item_id;
    card.appendChild(img);
  } else if (item.features) {
    const table = document.createElement('table');
    table.className = 'feature-card';
    item.features.forEach((value, i) => {
      const row = table.insertRow();
      row.insertCell().textContent = `feature ${i + 1}`;
      const bar = row.insertCell();
      const span = document.createElement('span');
      span.className = value >= 0 ? 'bar pos' : 'bar neg';
      span.style.width = `${Math.min(Math.abs(value) * 120, 160)}px`;
      bar.appendChild(span);
      row.insertCell().textContent = value.toFixed(3);
    });
    card.appendChild(table);
  } else {
    card.textContent = item.item_id;
  }
}

function sleep(ms: number) {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export function main() {
  const ui = elements();
  let pending: ((label: 1 | -1) => void) | null = null;

  const answerClicked = (label: 1 | -1) => {
    if (pending) {
      const resolve = pending;
      pending = null;
      ui.buttonPos.disabled = true;
      ui.buttonNeg.disabled = true;
      resolve(label);
    }
  };
  ui.buttonPos.addEventListener('click', () => answerClicked(1));
  ui.buttonNeg.addEventListener('click', () => answerClicked(-1));
  document.addEventListener('keydown', (event) => {
    if (event.key === '1') answerClicked(1);
    if (event.key === '2') answerClicked(-1);
  });

  async function runSession(stored: Stored) {
    const api = new SessionApi(stored.baseUrl);
    const driver = new SessionDriver(api);
    ui.buttonPos.textContent = `${stored.info.labels['1']} (1)`;
    ui.buttonNeg.textContent = `${stored.info.labels['-1']} (2)`;
    show(ui.start, false);
    show(ui.run, true);

    const total = stored.info.n_teach + stored.info.n_test;
    const answer = () =>
      new Promise<1 | -1>((resolve) => {
        pending = resolve;
        ui.buttonPos.disabled = false;
        ui.buttonNeg.disabled = false;
      });

    try {
      const completed = await driver.resume(stored.info, answer, {
        onItem(item: Item) {
          ui.phase.textContent = item.phase === 'teach' ? 'Training' : 'Test';
          ui.progress.textContent = `${item.index + 1} / ${total}`;
          ui.feedback.textContent = '';
          renderItem(ui.card, item, stored.baseUrl);
        },
        async onFeedback(item: Item, feedback: Feedback) {
          if (feedback.feedback) {
            const name = stored.info.labels[feedback.feedback.correct_label === 1 ? '1' : '-1'];
            ui.feedback.textContent = `Correct label: ${name}`;
            await sleep(FEEDBACK_DWELL_MS);
          } else {
            ui.feedback.textContent = 'Answer recorded.';
            await sleep(400);
          }
        },
        onDone(report: Report) {
          sessionStorage.removeItem('crowdteach-session');
          show(ui.run, false);
          show(ui.done, true);
          const correct = Math.round((1 - report.test_error) * stored.info.n_test);
          ui.score.textContent =
            `Test score: ${correct} / ${stored.info.n_test} correct ` +
            `(error rate ${(report.test_error * 100).toFixed(0)}%)`;
        },
      });
      return completed;
    } catch (error) {
      show(ui.banner, true);
      ui.banner.textContent =
        error instanceof ApiError
          ? `Server error (${error.status}). Reload to resume where you left off.`
          : 'Connection lost. Reload to resume where you left off.';
      throw error;
    }
  }

  ui.startButton.addEventListener('click', async () => {
    const baseUrl = ui.baseUrl.value.replace(/\/$/, '');
    const api = new SessionApi(baseUrl);
    try {
      const info = await api.createSession(ui.group.value.trim());
      const stored: Stored = { baseUrl, info };
      sessionStorage.setItem('crowdteach-session', JSON.stringify(stored));
      await runSession(stored);
    } catch (error) {
      show(ui.banner, true);
      ui.banner.textContent = `Could not start a session: ${error}`;
    }
  });

  ui.restart.addEventListener('click', () => window.location.reload());

  const saved = sessionStorage.getItem('crowdteach-session');
  if (saved) {
    void runSession(JSON.parse(saved) as Stored);
  }
}

main();
